#include "esbgk/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace esbgk {

namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// 7-point Gauss weights living on the odd Kronrod nodes 1, 3, 5 and the centre.
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double lo, double hi) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(centre);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

// Three-term recurrence for L_n^{(alpha)}(x); returns (L_n, L_{n-1}).
std::pair<double, double> laguerre(int n, double alpha, double x) {
  double prev = 1.0;
  if (n == 0) return {prev, 0.0};
  double curr = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * curr - (k + alpha) * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return {curr, prev};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                    double hi, double rel_tol, double abs_tol,
                                    int max_intervals) {
  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, lo, hi);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int intervals = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (intervals >= max_intervals) {
      throw QuadratureError("adaptive quadrature did not converge: error estimate " +
                            std::to_string(error) + " for value " + std::to_string(total));
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Segment left = kronrod15(f, worst.lo, mid);
    const Segment right = kronrod15(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    // The running error can drift below zero through cancellation; recompute.
    if (intervals % 64 == 0 || error <= 0.0) {
      std::priority_queue<Segment> copy = heap;
      total = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, error, intervals};
}

GaussLaguerreRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be positive");
  if (!(alpha > -1.0)) throw std::invalid_argument("gauss_laguerre: alpha must exceed -1");

  // Golub–Welsch: eigenvalues of the symmetric Jacobi matrix give the nodes.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    jacobi(k, k) = 2.0 * k + alpha + 1.0;
    if (k + 1 < n) {
      const double off = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
      jacobi(k, k + 1) = off;
      jacobi(k + 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  Eigen::ArrayXd nodes = solver.eigenvalues().array();

  // Newton polish on L_n^{(alpha)} using x L_n' = n L_n - (n + alpha) L_{n-1}.
  for (int k = 0; k < n; ++k) {
    double x = nodes(k);
    for (int it = 0; it < 8; ++it) {
      const auto [ln, lnm1] = laguerre(n, alpha, x);
      const double derivative = (n * ln - (n + alpha) * lnm1) / x;
      const double step = ln / derivative;
      x -= step;
      if (std::abs(step) <= 4e-16 * std::abs(x)) break;
    }
    nodes(k) = x;
  }

  GaussLaguerreRule rule;
  rule.nodes = nodes;
  rule.weights.resize(n);
  rule.log_scaled_weights.resize(n);
  const double log_prefactor =
      std::lgamma(n + alpha + 1.0) - std::lgamma(n + 1.0) - 2.0 * std::log(n + 1.0);
  for (int k = 0; k < n; ++k) {
    const double next = laguerre(n + 1, alpha, nodes(k)).first;
    const double log_weight = log_prefactor + std::log(nodes(k)) - 2.0 * std::log(std::abs(next));
    rule.weights(k) = std::exp(log_weight);
    rule.log_scaled_weights(k) = log_weight + nodes(k);
  }
  return rule;
}

}  // namespace esbgk
