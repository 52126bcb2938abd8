#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairgeo/matrix.hpp"

namespace fairgeo {

inline constexpr double kPmfTolerance = 1e-12;
inline constexpr double kJointTolerance = 1e-10;

enum class LogBase { Nats, Bits };

/// Converts a quantity measured in nats to `base`.
double to_base(double nats, LogBase base) noexcept;

/// Probability mass function over a finite alphabet. Construction validates:
/// entries are nonnegative and sum to one within kPmfTolerance. Inputs that are
/// off are rejected, never renormalized.
class Pmf {
 public:
  explicit Pmf(Vector probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  const Vector& vector() const noexcept { return probs_; }

  double min() const;
  double max() const;
  bool strictly_positive() const;
  /// Element-wise square root, as a plain vector.
  Vector sqrt() const;

  static Pmf uniform(std::size_t n);

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  Vector probs_;
};

/// Column-stochastic conditional distribution: entry (o, i) is P(out = o | in = i).
class Channel {
 public:
  explicit Channel(Matrix matrix);

  std::size_t out_size() const noexcept { return matrix_.rows(); }
  std::size_t in_size() const noexcept { return matrix_.cols(); }
  const Matrix& matrix() const noexcept { return matrix_; }
  double operator()(std::size_t out, std::size_t in) const { return matrix_(out, in); }
  Pmf column(std::size_t in) const { return Pmf(matrix_.column(in)); }

  static Channel identity(std::size_t n) { return Channel(Matrix::identity(n)); }
  /// Channel whose columns are the given pmfs.
  static Channel from_columns(const std::vector<Pmf>& columns);

  friend bool operator==(const Channel&, const Channel&) = default;

 private:
  Matrix matrix_;
};

/// Throws unless every block st[x] is a nonnegative |S| x |T| matrix whose row sums are
/// P_{S|X}(.|x) and column sums P_{T|X}(.|x), within kPmfTolerance.
void check_coupling(const std::vector<Matrix>& st, const Channel& s_given_x, const Channel& t_given_x);

/// Joint distribution over (s, t, x, y).
class JointDist {
 public:
  enum class Axis : std::size_t { S = 0, T = 1, X = 2, Y = 3 };

  /// `table` is laid out with y fastest: index ((s * nt + t) * nx + x) * ny + y.
  JointDist(std::array<std::size_t, 4> dims, Vector table);

  /// Markov assembly P(s,t,x,y) = P_X(x) P(s,t | x) P(y | x). `st_given_x[x]` is an
  /// |S| x |T| matrix. Without a coupling, S and T are taken conditionally independent
  /// given X.
  static JointDist from_markov(const Pmf& p_x, const Channel& p_s_given_x,
                               const Channel& p_t_given_x, const Channel& p_y_given_x,
                               const std::optional<std::vector<Matrix>>& st_given_x = std::nullopt);

  std::array<std::size_t, 4> dims() const noexcept { return dims_; }
  double operator()(std::size_t s, std::size_t t, std::size_t x, std::size_t y) const;
  std::span<const double> table() const noexcept { return table_; }

  /// Two-axis marginal; rows index `a`, columns index `b`.
  Matrix marginal(Axis a, Axis b) const;
  Pmf marginal(Axis a) const;

 private:
  std::array<std::size_t, 4> dims_;
  Vector table_;
};

double entropy(const Pmf& p, LogBase base);

/// Exact I(X;Y) of a joint given as a matrix (rows x, cols y).
double mutual_information(const Matrix& joint_xy, LogBase base);

/// D(p || q). Throws SupportError if q vanishes where p does not.
double kl_divergence(const Pmf& p, const Pmf& q, LogBase base);

/// Pearson chi-squared divergence sum (p - q)^2 / q. Throws SupportError on a zero in q.
double chi_squared(std::span<const double> p, std::span<const double> q);
double chi_squared(const Pmf& p, const Pmf& q);

/// Largest |P(y|s1) - P(y|s2)| over all y and pairs (s1, s2).
double parity_gap(const Channel& p_y_given_s);

/// Channel composition (matrix product). compose(P_{A|B}, P_{B|C}) = P_{A|C}.
Channel compose(const Channel& a_given_b, const Channel& b_given_c);
/// Pushes a pmf through a channel.
Pmf apply(const Channel& channel, const Pmf& p);

/// Bayes inversion: P_{Y|X}(y|x) = P_{X|Y}(x|y) P_Y(y) / P_X(x).
/// Requires sum_y P_{X|Y}(x|y) P_Y(y) = P_X(x) within 1e-9.
Channel bayes_invert(const Channel& p_x_given_y, const Pmf& p_y, const Pmf& p_x);

/// Joint matrix (rows: input, cols: output) of an input pmf pushed through a channel.
Matrix joint_of(const Pmf& p_in, const Channel& out_given_in);

}  // namespace fairgeo
