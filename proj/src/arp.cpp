#include "arpbo/arp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "arpbo/errors.hpp"

namespace arpbo {

ArpConfig ArpConfig::resolve(int dimension) const {
  ArpConfig c = *this;
  if (!c.activation_threshold) c.activation_threshold = std::max(16, 2 * dimension);
  if (*c.activation_threshold < 4) throw ConfigError("arp: activation_threshold must be >= 4");
  if (c.svm_budget < 1) throw ConfigError("arp: svm_budget must be >= 1");
  if (!(c.svm_c > 0)) throw ConfigError("arp: svm_c must be positive");
  if (!(c.fallback_fraction > 0 && c.fallback_fraction <= 1))
    throw ConfigError("arp: fallback_fraction must lie in (0, 1]");
  if (c.restart_attempt_factor < 1) throw ConfigError("arp: restart_attempt_factor must be >= 1");
  return c;
}

std::vector<bool> label_observations(const Vector& values) {
  const auto n = values.size();
  if (n < 4) throw InputError("label_observations needs at least 4 values");
  if (!values.allFinite()) throw InputError("label_observations needs finite values");
  if (values.maxCoeff() == values.minCoeff()) throw DegenerateError("all values identical; nothing to split");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values(a) < values(b); });

  // Prefix sums give each split's SSE in O(1): sum(x^2) - (sum x)^2 / count.
  std::vector<double> s1(static_cast<std::size_t>(n) + 1, 0.0), s2(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = values(order[static_cast<std::size_t>(k)]);
    s1[k + 1] = s1[k] + v;
    s2[k + 1] = s2[k] + v * v;
  }
  auto sse = [&](Eigen::Index lo, Eigen::Index hi) {
    const double cnt = static_cast<double>(hi - lo);
    const double sum = s1[hi] - s1[lo];
    return std::max(0.0, (s2[hi] - s2[lo]) - sum * sum / cnt);
  };
  Eigen::Index best_split = 1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k < n; ++k) {
    // Splitting between equal values would put one value in both groups.
    if (values(order[k - 1]) == values(order[k])) continue;
    const double total = sse(0, k) + sse(k, n);
    if (total < best) {
      best = total;
      best_split = k;
    }
  }
  std::vector<bool> good(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < best_split; ++k) good[static_cast<std::size_t>(order[k])] = true;
  return good;
}

double two_cluster_sse(const Vector& values, const std::vector<bool>& labels) {
  double total = 0.0;
  for (bool side : {true, false}) {
    double sum = 0.0, cnt = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
      if (labels[static_cast<std::size_t>(i)] == side) {
        sum += values(i);
        cnt += 1.0;
      }
    if (cnt == 0) continue;
    const double mean = sum / cnt;
    for (Eigen::Index i = 0; i < values.size(); ++i)
      if (labels[static_cast<std::size_t>(i)] == side) total += (values(i) - mean) * (values(i) - mean);
  }
  return total;
}

RegionClassifier::RegionClassifier(Matrix support_vectors, Vector dual_coefs, double bias, double gamma,
                                   int trained_on, double training_accuracy)
    : support_vectors_(std::move(support_vectors)),
      dual_coefs_(std::move(dual_coefs)),
      bias_(bias),
      gamma_(gamma),
      trained_on_(trained_on),
      training_accuracy_(training_accuracy) {}

double RegionClassifier::decision(const Vector& w) const {
  double f = bias_;
  for (Eigen::Index i = 0; i < support_vectors_.rows(); ++i)
    f += dual_coefs_(i) * std::exp(-gamma_ * (support_vectors_.row(i).transpose() - w).squaredNorm());
  return f;
}

Vector RegionClassifier::decision(const Matrix& rows) const {
  Vector out(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) out(r) = decision(Vector(rows.row(r).transpose()));
  return out;
}

namespace {

double median_gamma(const Matrix& x) {
  std::vector<double> d2;
  const auto n = x.rows();
  d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d2.push_back((x.row(i) - x.row(j)).squaredNorm());
  const auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  double med = *mid;
  if (d2.size() % 2 == 0) med = 0.5 * (med + *std::max_element(d2.begin(), mid));
  if (!(med > 0)) {
    // Mostly duplicates: fall back to the mean of the nonzero distances.
    double sum = 0.0;
    int cnt = 0;
    for (double v : d2)
      if (v > 0) {
        sum += v;
        ++cnt;
      }
    med = cnt > 0 ? sum / cnt : 1.0;
  }
  return 1.0 / med;
}

}  // namespace

RegionClassifier fit_classifier(const Matrix& points, const std::vector<bool>& labels,
                                const ArpConfig& config) {
  const auto n = points.rows();
  if (static_cast<std::size_t>(n) != labels.size()) throw ShapeError("points and labels differ in length");
  if (n < 4) throw InvalidLabelsError("classifier needs at least 4 points");
  const auto n_good = std::count(labels.begin(), labels.end(), true);
  if (n_good == 0 || n_good == n) throw InvalidLabelsError("classifier needs both labels present");

  const double gamma = median_gamma(points);
  const double c = config.svm_c;
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)] ? 1.0 : -1.0;

  Matrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      k(i, j) = k(j, i) = std::exp(-gamma * (points.row(i) - points.row(j)).squaredNorm());

  // Dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, with Q = diag(y) K diag(y).
  Vector alpha = Vector::Zero(n);
  Vector grad = -Vector::Ones(n);
  constexpr double kTol = 1e-3;
  constexpr double kTau = 1e-12;
  const long max_iter = static_cast<long>(config.svm_budget) * n;
  for (long iter = 0; iter < max_iter; ++iter) {
    Eigen::Index i = -1, j = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      const bool up = (y(t) > 0 && alpha(t) < c) || (y(t) < 0 && alpha(t) > 0);
      const bool low = (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < c);
      if (up && v > gmax) { gmax = v; i = t; }
      if (low && v < gmin) { gmin = v; j = t; }
    }
    if (i < 0 || j < 0 || gmax - gmin < kTol) break;

    const double qij = y(i) * y(j) * k(i, j);
    const double old_ai = alpha(i), old_aj = alpha(j);
    if (y(i) != y(j)) {
      const double quad = std::max(k(i, i) + k(j, j) + 2.0 * qij, kTau);
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = diff; }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = c - diff; }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      const double quad = std::max(k(i, i) + k(j, j) - 2.0 * qij, kTau);
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = sum - c; }
        if (alpha(j) > c) { alpha(j) = c; alpha(i) = sum - c; }
      } else {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = sum; }
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = sum; }
      }
    }
    const double dai = alpha(i) - old_ai, daj = alpha(j) - old_aj;
    for (Eigen::Index t = 0; t < n; ++t)
      grad(t) += y(t) * (y(i) * k(i, t) * dai + y(j) * k(j, t) * daj);
  }

  // rho from free vectors, else the midpoint of the feasible interval.
  double free_sum = 0.0;
  int free_cnt = 0;
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (alpha(t) > 0 && alpha(t) < c) {
      free_sum += yg;
      ++free_cnt;
    } else if ((alpha(t) >= c && y(t) < 0) || (alpha(t) <= 0 && y(t) > 0)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  double rho = free_cnt > 0 ? free_sum / free_cnt : 0.5 * (ub + lb);
  if (!std::isfinite(rho)) rho = 0.0;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t)
    if (alpha(t) > 0) sv.push_back(t);
  Matrix support(static_cast<Eigen::Index>(sv.size()), points.cols());
  Vector coefs(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    support.row(static_cast<Eigen::Index>(s)) = points.row(sv[s]);
    coefs(static_cast<Eigen::Index>(s)) = alpha(sv[s]) * y(sv[s]);
  }
  RegionClassifier model(std::move(support), std::move(coefs), -rho, gamma, static_cast<int>(n), 0.0);
  int correct = 0;
  for (Eigen::Index t = 0; t < n; ++t)
    correct += (model.decision(Vector(points.row(t).transpose())) >= 0) == labels[static_cast<std::size_t>(t)];
  return RegionClassifier(model.support_vectors(), model.dual_coefs(), model.bias(), gamma, static_cast<int>(n),
                          static_cast<double>(correct) / static_cast<double>(n));
}

std::vector<Eigen::Index> select_candidates(const RegionClassifier& classifier, const Matrix& candidates,
                                            const Vector& best_point, double fallback_fraction) {
  const auto n = candidates.rows();
  if (n == 0) return {};
  const bool positive = classifier.decision(best_point) >= 0;
  const Vector score = classifier.decision(candidates) * (positive ? 1.0 : -1.0);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool on_side = positive ? score(i) >= 0 : score(i) > 0;
    if (on_side) kept.push_back(i);
  }
  const auto minimum = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::ceil(fallback_fraction * static_cast<double>(n) - 1e-9)));
  if (static_cast<Eigen::Index>(kept.size()) >= minimum) return kept;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score(a) > score(b); });
  order.resize(static_cast<std::size_t>(std::min(minimum, n)));
  std::sort(order.begin(), order.end());
  return order;
}

Matrix filter_candidates(const RegionClassifier& classifier, const Matrix& candidates, const Vector& best_point,
                         double fallback_fraction) {
  const auto idx = select_candidates(classifier, candidates, best_point, fallback_fraction);
  Matrix out(static_cast<Eigen::Index>(idx.size()), candidates.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = candidates.row(idx[r]);
  return out;
}

std::vector<Point> restart_samples(const RegionClassifier& classifier, const SearchSpace& space, Rng& rng,
                                   int count, const ArpConfig& config) {
  std::vector<Point> out;
  if (count <= 0) return out;
  const long attempts = static_cast<long>(config.restart_attempt_factor) * count;
  for (long a = 0; a < attempts && static_cast<int>(out.size()) < count; ++a) {
    Point p = random_point(space, rng);
    if (classifier.decision(warp(space, p)) > 0) out.push_back(std::move(p));
  }
  while (static_cast<int>(out.size()) < count) out.push_back(random_point(space, rng));
  return out;
}

}  // namespace arpbo
