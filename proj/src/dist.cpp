#include "fairgeo/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fairgeo/error.hpp"

namespace fairgeo {

namespace {

void check_probs(std::span<const double> probs, const char* what) {
  if (probs.empty()) throw ValidationError(std::string(what) + ": empty alphabet");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < 0.0)
      throw ValidationError(std::string(what) + ": entry " + std::to_string(i) +
                            " is negative or not finite");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPmfTolerance)
    throw ValidationError(std::string(what) + ": entries do not sum to 1");
}

double xlogx_sum(std::span<const double> p) {
  double acc = 0.0;
  for (double v : p)
    if (v > 0.0) acc -= v * std::log(v);
  return acc;
}

}  // namespace

double to_base(double nats, LogBase base) noexcept {
  return base == LogBase::Nats ? nats : nats / std::numbers::ln2;
}

Pmf::Pmf(Vector probs) : probs_(std::move(probs)) { check_probs(probs_, "pmf"); }

double Pmf::min() const { return *std::min_element(probs_.begin(), probs_.end()); }
double Pmf::max() const { return *std::max_element(probs_.begin(), probs_.end()); }
bool Pmf::strictly_positive() const { return min() > 0.0; }

Vector Pmf::sqrt() const {
  Vector out(probs_);
  for (double& v : out) v = std::sqrt(v);
  return out;
}

Pmf Pmf::uniform(std::size_t n) { return Pmf(Vector(n, 1.0 / static_cast<double>(n))); }

Channel::Channel(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) throw ValidationError("channel: empty matrix");
  for (std::size_t c = 0; c < matrix_.cols(); ++c) {
    const Vector col = matrix_.column(c);
    try {
      check_probs(col, "channel column");
    } catch (const ValidationError&) {
      throw ValidationError("channel: column " + std::to_string(c) + " is not a pmf");
    }
  }
}

Channel Channel::from_columns(const std::vector<Pmf>& columns) {
  std::vector<Vector> cols;
  cols.reserve(columns.size());
  for (const auto& p : columns) cols.push_back(p.vector());
  return Channel(Matrix::from_columns(cols));
}

JointDist::JointDist(std::array<std::size_t, 4> dims, Vector table)
    : dims_(dims), table_(std::move(table)) {
  const std::size_t expected = dims[0] * dims[1] * dims[2] * dims[3];
  if (expected == 0 || table_.size() != expected)
    throw DimensionError("joint: table size does not match alphabet sizes");
  double sum = 0.0;
  for (double v : table_) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("joint: negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kJointTolerance) throw ValidationError("joint: entries do not sum to 1");
}

void check_coupling(const std::vector<Matrix>& st, const Channel& s_given_x, const Channel& t_given_x) {
  const std::size_t nx = s_given_x.in_size();
  if (st.size() != nx) throw DimensionError("coupling: need one |S| x |T| block per x");
  for (std::size_t x = 0; x < nx; ++x) {
    const Matrix& m = st[x];
    if (m.rows() != s_given_x.out_size() || m.cols() != t_given_x.out_size())
      throw DimensionError("coupling: block " + std::to_string(x) + " has the wrong shape");
    for (double v : m.data())
      if (!(v >= 0.0)) throw ValidationError("coupling: negative entry in block " + std::to_string(x));
    for (std::size_t s = 0; s < m.rows(); ++s) {
      double acc = 0.0;
      for (std::size_t t = 0; t < m.cols(); ++t) acc += m(s, t);
      if (std::abs(acc - s_given_x(s, x)) > kPmfTolerance)
        throw ConsistencyError("coupling: block " + std::to_string(x) + " does not reproduce P_{S|X}");
    }
    for (std::size_t t = 0; t < m.cols(); ++t) {
      double acc = 0.0;
      for (std::size_t s = 0; s < m.rows(); ++s) acc += m(s, t);
      if (std::abs(acc - t_given_x(t, x)) > kPmfTolerance)
        throw ConsistencyError("coupling: block " + std::to_string(x) + " does not reproduce P_{T|X}");
    }
  }
}

JointDist JointDist::from_markov(const Pmf& p_x, const Channel& p_s_given_x,
                                 const Channel& p_t_given_x, const Channel& p_y_given_x,
                                 const std::optional<std::vector<Matrix>>& st_given_x) {
  const std::size_t nx = p_x.size();
  if (p_s_given_x.in_size() != nx || p_t_given_x.in_size() != nx || p_y_given_x.in_size() != nx)
    throw DimensionError("joint: channel input sizes differ from |X|");
  const std::size_t ns = p_s_given_x.out_size();
  const std::size_t nt = p_t_given_x.out_size();
  const std::size_t ny = p_y_given_x.out_size();
  if (st_given_x) check_coupling(*st_given_x, p_s_given_x, p_t_given_x);

  Vector table(ns * nt * nx * ny);
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t x = 0; x < nx; ++x) {
        const double st = st_given_x ? (*st_given_x)[x](s, t) : p_s_given_x(s, x) * p_t_given_x(t, x);
        for (std::size_t y = 0; y < ny; ++y)
          table[((s * nt + t) * nx + x) * ny + y] = p_x[x] * st * p_y_given_x(y, x);
      }
  return JointDist({ns, nt, nx, ny}, std::move(table));
}

double JointDist::operator()(std::size_t s, std::size_t t, std::size_t x, std::size_t y) const {
  return table_[((s * dims_[1] + t) * dims_[2] + x) * dims_[3] + y];
}

Matrix JointDist::marginal(Axis a, Axis b) const {
  const auto ia = static_cast<std::size_t>(a);
  const auto ib = static_cast<std::size_t>(b);
  if (ia == ib) throw DimensionError("joint: marginal axes must differ");
  Matrix out(dims_[ia], dims_[ib]);
  std::array<std::size_t, 4> idx{};
  for (idx[0] = 0; idx[0] < dims_[0]; ++idx[0])
    for (idx[1] = 0; idx[1] < dims_[1]; ++idx[1])
      for (idx[2] = 0; idx[2] < dims_[2]; ++idx[2])
        for (idx[3] = 0; idx[3] < dims_[3]; ++idx[3])
          out(idx[ia], idx[ib]) += (*this)(idx[0], idx[1], idx[2], idx[3]);
  return out;
}

Pmf JointDist::marginal(Axis a) const {
  const Axis other = a == Axis::S ? Axis::T : Axis::S;
  const Matrix m = marginal(a, other);
  Vector p(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) p[r] += m(r, c);
  return Pmf(std::move(p));
}

double entropy(const Pmf& p, LogBase base) { return to_base(xlogx_sum(p.probs()), base); }

double mutual_information(const Matrix& joint_xy, LogBase base) {
  check_probs(joint_xy.data(), "joint_xy");
  Vector px(joint_xy.rows(), 0.0), py(joint_xy.cols(), 0.0);
  for (std::size_t x = 0; x < joint_xy.rows(); ++x)
    for (std::size_t y = 0; y < joint_xy.cols(); ++y) {
      px[x] += joint_xy(x, y);
      py[y] += joint_xy(x, y);
    }
  double acc = 0.0;
  for (std::size_t x = 0; x < joint_xy.rows(); ++x)
    for (std::size_t y = 0; y < joint_xy.cols(); ++y) {
      const double pxy = joint_xy(x, y);
      if (pxy > 0.0) acc += pxy * std::log(pxy / (px[x] * py[y]));
    }
  return to_base(std::max(acc, 0.0), base);
}

double kl_divergence(const Pmf& p, const Pmf& q, LogBase base) {
  if (p.size() != q.size()) throw DimensionError("kl_divergence: alphabet sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw SupportError("kl_divergence: q vanishes at index " + std::to_string(i) +
                         " where p is positive");
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return to_base(std::max(acc, 0.0), base);
}

double chi_squared(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("chi_squared: alphabet sizes differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(q[i] > 0.0))
      throw SupportError("chi_squared: reference has zero mass at index " + std::to_string(i));
    const double d = p[i] - q[i];
    acc += d * d / q[i];
  }
  return acc;
}

double chi_squared(const Pmf& p, const Pmf& q) { return chi_squared(p.probs(), q.probs()); }

double parity_gap(const Channel& p_y_given_s) {
  const Matrix& m = p_y_given_s.matrix();
  double gap = 0.0;
  for (std::size_t y = 0; y < m.rows(); ++y) {
    double lo = m(y, 0), hi = m(y, 0);
    for (std::size_t s = 1; s < m.cols(); ++s) {
      lo = std::min(lo, m(y, s));
      hi = std::max(hi, m(y, s));
    }
    gap = std::max(gap, hi - lo);
  }
  return gap;
}

Channel compose(const Channel& a_given_b, const Channel& b_given_c) {
  if (a_given_b.in_size() != b_given_c.out_size())
    throw DimensionError("compose: inner alphabet sizes differ");
  return Channel(a_given_b.matrix() * b_given_c.matrix());
}

Pmf apply(const Channel& channel, const Pmf& p) {
  if (channel.in_size() != p.size()) throw DimensionError("apply: pmf size differs from channel input");
  return Pmf(channel.matrix() * p.probs());
}

Channel bayes_invert(const Channel& p_x_given_y, const Pmf& p_y, const Pmf& p_x) {
  const std::size_t nx = p_x_given_y.out_size();
  const std::size_t ny = p_x_given_y.in_size();
  if (p_y.size() != ny || p_x.size() != nx) throw DimensionError("bayes_invert: size mismatch");

  const Vector recomposed = p_x_given_y.matrix() * p_y.probs();
  for (std::size_t x = 0; x < nx; ++x) {
    if (p_x[x] == 0.0)
      throw SupportError("bayes_invert: P_X vanishes at index " + std::to_string(x));
    if (std::abs(recomposed[x] - p_x[x]) > 1e-9)
      throw ConsistencyError("bayes_invert: sum_y P(x|y)P(y) differs from P_X at index " +
                             std::to_string(x));
  }
  // Dividing by the recomposed marginal (equal to P_X within 1e-9) keeps each column exactly
  // stochastic up to rounding.
  Matrix out(ny, nx);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) out(y, x) = p_x_given_y(x, y) * p_y[y] / recomposed[x];
  return Channel(std::move(out));
}

Matrix joint_of(const Pmf& p_in, const Channel& out_given_in) {
  if (out_given_in.in_size() != p_in.size()) throw DimensionError("joint_of: size mismatch");
  Matrix j(p_in.size(), out_given_in.out_size());
  for (std::size_t i = 0; i < p_in.size(); ++i)
    for (std::size_t o = 0; o < out_given_in.out_size(); ++o) j(i, o) = p_in[i] * out_given_in(o, i);
  return j;
}

}  // namespace fairgeo
