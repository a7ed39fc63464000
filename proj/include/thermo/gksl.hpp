#pragma once

#include "thermo/core.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace thermo::gksl {

// Gamma(X) = sum_k 1/2 (V_k^dag V_k X + X V_k^dag V_k) - V_k X V_k^dag
Superoperator dissipator(const std::vector<ComplexMatrix>& ops);

class GKSLGenerator {
 public:
  GKSLGenerator(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> lindblad_ops);

  const ComplexMatrix& hamiltonian() const { return h_; }
  const std::vector<ComplexMatrix>& lindblad_ops() const { return ops_; }
  // -i ad_H - Gamma
  const Superoperator& superop() const { return l_; }
  int dim() const { return static_cast<int>(h_.rows()); }

 private:
  ComplexMatrix h_;
  std::vector<ComplexMatrix> ops_;
  Superoperator l_;
};

class ThermalSetup {
 public:
  ThermalSetup(const RealVector& h0_diag, double temperature);

  const RealVector& energies() const { return e_; }
  double temperature() const { return t_; }
  int dim() const { return static_cast<int>(e_.size()); }
  ComplexMatrix h0() const;
  const GibbsVector& gibbs() const { return d_; }
  ComplexMatrix gibbs_state() const;

 private:
  RealVector e_;
  double t_;
  GibbsVector d_;
};

// theta_k = arccos((1 + d_{k+1}/d_k)^{-1/2})
RealVector thermal_angles(const GibbsVector& d);

struct LadderOps {
  ComplexMatrix raise;  // sum_k sqrt(k(n-k)) cos(theta_k) |k><k+1|
  ComplexMatrix lower;  // sum_k sqrt(k(n-k)) sin(theta_k) |k+1><k|
};

LadderOps ladder_ops(const GibbsVector& d, int n);
// Gamma of the two ladder operators.
Superoperator ladder_dissipator(const GibbsVector& d);

struct TaylorTerms {
  Superoperator order1;
  Superoperator order2;
};

// First and second derivative at t = 0 of X -> tr_bath(e^{-itH}(X (x) w)e^{itH}).
TaylorTerms stinespring_taylor(const ComplexMatrix& h, const ComplexMatrix& omega);
// The dilated channel itself at time t.
Superoperator stinespring_channel(const ComplexMatrix& h, const ComplexMatrix& omega, double t);

struct Eigensystem {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns; largest-modulus component made real positive
};

// Hermitian eigendecomposition; ties keep the original index order for
// diagonal input.
Eigensystem hermitian_eigensystem(const ComplexMatrix& h);

struct LindbladTerm {
  int row;  // bath level carrying the temperature weight
  int col;
  ComplexMatrix op;
};

struct MarkovGenerator {
  GKSLGenerator generator;
  std::vector<LindbladTerm> terms;
  Eigensystem bath;
};

// Lindblad operators V_jk = exp(-(E'_j - E'_0)/(2T)) tr_{|g_j><g_k|}(H_tot), E'_0 the
// lowest bath energy, and generator -i ad_H - sum Gamma_{V_jk}.
MarkovGenerator markov_to_generator(const ComplexMatrix& h_tot, const ComplexMatrix& h_bath, const ComplexMatrix& h,
                                    const ThermalSetup& setup, double tol = 1e-10);

struct LadderCoupling {
  ComplexMatrix h_tot;   // 2n x 2n, system (x) two-level bath
  ComplexMatrix h_bath;  // diag(0, 1) dE
  ThermalSetup setup;    // H0 = diag(0, ..., n-1) dE
};

ComplexMatrix ladder_htot(int n, double spacing, double temperature);
LadderCoupling ladder_coupling(int n, double spacing, double temperature);

// Compressed Choi matrix (1 - |W><W|) C (1 - |W><W|) is PSD up to -1e-9 ||C||.
bool cond_cp(const Superoperator& l);
double cond_cp_min_eigenvalue(const Superoperator& l);

struct EntoReport {
  bool hermiticity_preserving = false;
  bool trace_annihilating = false;
  bool conditionally_cp = false;
  bool gibbs_fixed = false;
  bool covariant = false;
  double gibbs_residual = 0;
  double commutator_norm = 0;
  double ccp_min_eigenvalue = 0;

  bool ok() const {
    return hermiticity_preserving && trace_annihilating && conditionally_cp && gibbs_fixed && covariant;
  }
};

EntoReport is_ento_generator(const Superoperator& l, const ThermalSetup& setup, double tol = 1e-9);
bool is_edge_generator(const ComplexMatrix& h, const ThermalSetup& setup, double tol = 1e-9);

// Randomised search for wedge generators that the dilation construction
// fails to reproduce. Each sample draws an admissible generator, then fits
// (H_tot, H) by Nelder-Mead over the commutant parametrisation with H_B = H0.
struct SearchSample {
  double target_norm = 0;
  double best_residual = 0;
};

struct SearchReport {
  std::vector<SearchSample> samples;
  double worst_residual = 0;
};

SearchReport converse_search(const ThermalSetup& setup, int samples, std::uint64_t seed, int restarts = 4,
                             int max_evals = 4000);

}  // namespace thermo::gksl
