#pragma once

#include <utility>
#include <vector>

#include "ewens/core.hpp"

namespace ewens::moments {

enum class Provenance { ExactRecurrence, Watterson, TruncatedUpsilon, MonteCarlo, TargetLaw };

/// Factorial moments E X_(1) .. E X_(L) of some integer statistic, tagged
/// with how they were obtained.  std_errors is populated only for
/// Monte Carlo estimates.
struct FactorialMomentVector {
    int order = 0;
    std::vector<double> values;
    std::vector<double> std_errors;
    Provenance provenance = Provenance::ExactRecurrence;

    /// 1-based: value(l) = E X_(l).
    [[nodiscard]] double value(int l) const;
    [[nodiscard]] double std_error(int l) const;
};

/// x (x-1) ... (x-r+1).
[[nodiscard]] double falling_factorial(double x, int r);

/// Joint factorial moment E prod_i k_{c_i}(sigma)_(e_i) for distinct cycle
/// lengths c_i with orders e_i:
///   psi_n(n - l) * 1{l <= n} * prod_i (theta/c_i)^{e_i},   l = sum c_i e_i.
[[nodiscard]] double watterson_moment(const EwensParams& params,
                                      const std::vector<std::pair<int, int>>& multi);

/// E h(sigma)_(k) for h = w(sigma, J) counting cycles with lengths in J
/// (distinct lengths, weight 1 each), assembled from joint Watterson moments
/// over weak compositions of k.  Independent of the recurrence path.
[[nodiscard]] double watterson_composed_moment(const EwensParams& params,
                                               const std::vector<int>& lengths, int k);

/// Dynamic program for the normalised moments
///   beta_m(k) = (theta^(m)/m!) * E_m h(sigma)_(k),
/// filled for all 0 <= m <= n, 0 <= k <= K via
///   beta_m(k) = theta * sum_{r=1..k} C(k-1, r-1) sum_j (a_j_(r)/j) beta_{m-j}(k-r),
/// with beta_m(0) = theta^(m)/m!.  Entries are kept on the beta scale in
/// plain (signed) doubles: beta_m(k) is polynomially bounded in m for fixed
/// theta, and the falling factorials a_j_(r) of negative weights alternate
/// sign, so a signed linear representation is both safe and fast here.
/// Construction throws ResourceError if theta^(n)/n! leaves double range.
class BetaTable {
  public:
    BetaTable(const EwensParams& params, const AdditiveSpec& spec, int max_order);

    [[nodiscard]] int max_order() const { return max_order_; }
    [[nodiscard]] double beta(int m, int k) const;
    /// gamma_n(k) = (n!/theta^(n)) beta_n(k); gamma_n(0) = 1.
    [[nodiscard]] double gamma(int k) const;

  private:
    int n_;
    int max_order_;
    double log_w_n_;                           // log(theta^(n)/n!)
    std::vector<std::vector<double>> table_;   // table_[k][m]
};

/// gamma_n(k) = E h(sigma)_(k) via the recurrence DP.
[[nodiscard]] double exact_factorial_moment(const EwensParams& params, const AdditiveSpec& spec,
                                            int k);
/// All orders 1..K from one table.
[[nodiscard]] FactorialMomentVector exact_factorial_moments(const EwensParams& params,
                                                            const AdditiveSpec& spec, int K);

/// Truncated main-term approximation of the l-th factorial moment:
/// sum over u and compositions r_1+..+r_u = l with parts <= m of
///   theta^u C(l-1, r_1-1) C(l-r_1-1, r_2-1) ...
///   sum_{j_1+..+j_u < n} prod a_{j_i}_(r_i)/j_i * (1 - J/n)^(theta-1).
/// Evaluated by truncated prefix convolutions of the vectors
/// v_r[j] = a_j_(r)/j shared along the composition tree.
[[nodiscard]] double upsilon_truncated(const EwensParams& params, const AdditiveSpec& spec, int l,
                                       int m);

/// 0/1-weight specialisation (all parts equal to 1).
[[nodiscard]] double upsilon_restricted(const EwensParams& params, const AdditiveSpec& subset,
                                        int l);

/// Shape (1 + log^k n)/n^(min(1, theta)) of the exact-vs-truncated moment
/// error; multiplied by an empirically fitted constant in the tests.
[[nodiscard]] double approx_error_bound(const EwensParams& params, int k, int m);

/// D_n(u; lambda) = sum_{j<=n} min(u^2, (a_j - lambda j)^2)/j.
[[nodiscard]] double concentration_D(const AdditiveSpec& spec, double u, double lambda);

struct ConcentrationMin {
    double value;
    double lambda;
};

/// min over a finite candidate set of lambda (0, small integers, a_j/j) of
/// D_n(u; lambda); the effective minimiser is integer, eventually 0.
[[nodiscard]] ConcentrationMin concentration_D_min(const AdditiveSpec& spec, double u);

}  // namespace ewens::moments
