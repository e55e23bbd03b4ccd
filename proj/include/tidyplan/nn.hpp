#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tidyplan/core.hpp"

namespace tidyplan {
namespace nn {

using Vec = std::vector<double>;

// Row-major dense matrix, sized once.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
  void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

// y = W x + b
void affine(const Mat& w, const Vec& b, const Vec& x, Vec& y);
// accumulate dW += dy x^T, db += dy; returns dx = W^T dy
void affine_backward(const Mat& w, const Vec& x, const Vec& dy, Mat& dw, Vec& db, Vec& dx);

inline double relu(double v) { return v > 0 ? v : 0; }
inline double relu_grad(double v) { return v > 0 ? 1.0 : 0.0; }

void softmax(const Vec& logits, Vec& probs);

// Multi-layer perceptron with rectifier hidden activations and a linear
// output. Output squashing (softmax/sigmoid) is applied by callers.
struct Mlp {
  std::vector<Mat> w;
  std::vector<Vec> b;

  Mlp() = default;
  Mlp(const std::vector<int>& dims, Rng& rng);

  int in_dim() const { return w.empty() ? 0 : w.front().cols; }
  int out_dim() const { return w.empty() ? 0 : w.back().rows; }

  struct Cache {
    std::vector<Vec> x;  // input of each layer
    std::vector<Vec> z;  // pre-activation of each layer
  };

  Vec forward(const Vec& in, Cache* cache = nullptr) const;
  // dOut on the linear output; accumulates into grads, returns dIn.
  Vec backward(const Cache& cache, const Vec& dout, Mlp& grads) const;

  Mlp zeros_like() const;
  void scale_accumulate(const Mlp& other, double factor);  // this += factor * other
};

// Adam over an arbitrary flat parameter list.
struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t t = 0;
  Vec m;
  Vec v;

  void init(size_t n) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
    t = 0;
  }
  void step(std::vector<double*>& params, const std::vector<double>& grads);
};

// Views over every scalar parameter, in a stable order.
std::vector<double*> param_view(Mlp& m);
std::vector<const double*> param_view(const Mlp& m);

}  // namespace nn
}  // namespace tidyplan
