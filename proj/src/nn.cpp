#include "tidyplan/nn.hpp"

#include <algorithm>
#include <cmath>

namespace tidyplan {
namespace nn {

void affine(const Mat& w, const Vec& b, const Vec& x, Vec& y) {
  if (static_cast<int>(x.size()) != w.cols || static_cast<int>(b.size()) != w.rows)
    throw PlanError(Err::shape_mismatch, "affine: dimension mismatch");
  y.assign(static_cast<size_t>(w.rows), 0.0);
  for (int r = 0; r < w.rows; ++r) {
    double acc = b[static_cast<size_t>(r)];
    const double* row = &w.a[static_cast<size_t>(r) * w.cols];
    for (int c = 0; c < w.cols; ++c) acc += row[c] * x[static_cast<size_t>(c)];
    y[static_cast<size_t>(r)] = acc;
  }
}

void affine_backward(const Mat& w, const Vec& x, const Vec& dy, Mat& dw, Vec& db, Vec& dx) {
  dx.assign(static_cast<size_t>(w.cols), 0.0);
  for (int r = 0; r < w.rows; ++r) {
    double g = dy[static_cast<size_t>(r)];
    db[static_cast<size_t>(r)] += g;
    double* dwr = &dw.a[static_cast<size_t>(r) * w.cols];
    const double* wr = &w.a[static_cast<size_t>(r) * w.cols];
    for (int c = 0; c < w.cols; ++c) {
      dwr[c] += g * x[static_cast<size_t>(c)];
      dx[static_cast<size_t>(c)] += wr[c] * g;
    }
  }
}

void softmax(const Vec& logits, Vec& probs) {
  double mx = *std::max_element(logits.begin(), logits.end());
  probs.resize(logits.size());
  double sum = 0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
}

Mlp::Mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw PlanError(Err::shape_mismatch, "mlp needs at least one layer");
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Mat wl(dims[l + 1], dims[l]);
    double scale = std::sqrt(2.0 / dims[l]);
    for (double& v : wl.a) v = rng.gaussian(0.0, scale);
    w.push_back(std::move(wl));
    b.push_back(Vec(static_cast<size_t>(dims[l + 1]), 0.0));
  }
}

Vec Mlp::forward(const Vec& in, Cache* cache) const {
  Vec x = in;
  if (cache) {
    cache->x.clear();
    cache->z.clear();
  }
  for (size_t l = 0; l < w.size(); ++l) {
    Vec z;
    affine(w[l], b[l], x, z);
    if (cache) {
      cache->x.push_back(x);
      cache->z.push_back(z);
    }
    if (l + 1 < w.size())
      for (double& v : z) v = relu(v);
    x = std::move(z);
  }
  return x;
}

Vec Mlp::backward(const Cache& cache, const Vec& dout, Mlp& grads) const {
  Vec d = dout;
  for (size_t li = w.size(); li-- > 0;) {
    if (li + 1 < w.size())
      for (size_t i = 0; i < d.size(); ++i) d[i] *= relu_grad(cache.z[li][i]);
    Vec dx;
    affine_backward(w[li], cache.x[li], d, grads.w[li], grads.b[li], dx);
    d = std::move(dx);
  }
  return d;
}

Mlp Mlp::zeros_like() const {
  Mlp g;
  for (const auto& wl : w) g.w.push_back(Mat(wl.rows, wl.cols));
  for (const auto& bl : b) g.b.push_back(Vec(bl.size(), 0.0));
  return g;
}

void Mlp::scale_accumulate(const Mlp& other, double factor) {
  for (size_t l = 0; l < w.size(); ++l) {
    for (size_t i = 0; i < w[l].a.size(); ++i) w[l].a[i] += factor * other.w[l].a[i];
    for (size_t i = 0; i < b[l].size(); ++i) b[l][i] += factor * other.b[l][i];
  }
}

void Adam::step(std::vector<double*>& params, const std::vector<double>& grads) {
  if (m.size() != params.size()) init(params.size());
  ++t;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1 - beta2) * grads[i] * grads[i];
    double mh = m[i] / bc1;
    double vh = v[i] / bc2;
    *params[i] -= lr * mh / (std::sqrt(vh) + eps);
  }
}

std::vector<double*> param_view(Mlp& m) {
  std::vector<double*> out;
  for (auto& wl : m.w)
    for (auto& v : wl.a) out.push_back(&v);
  for (auto& bl : m.b)
    for (auto& v : bl) out.push_back(&v);
  return out;
}

std::vector<const double*> param_view(const Mlp& m) {
  std::vector<const double*> out;
  for (const auto& wl : m.w)
    for (const auto& v : wl.a) out.push_back(&v);
  for (const auto& bl : m.b)
    for (const auto& v : bl) out.push_back(&v);
  return out;
}

}  // namespace nn
}  // namespace tidyplan
