#ifndef AFDMIL_TESTS_ORACLE_STRAIGHT_LINE_HPP
#define AFDMIL_TESTS_ORACLE_STRAIGHT_LINE_HPP

// Straight-line re-derivation of the dual-channel forward pass. Plain loops
// over std::vector only: no Eigen, no library kernels. The only thing taken
// from the library is raw parameter data.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, Mat[r][c]

struct Weights {
  std::map<std::string, Mat> t;
  const Mat& operator[](const std::string& name) const { return t.at(name); }
};

struct Options {
  int k = 4;
  bool max_pn = false;
  bool gated = true;
  bool distill = true;
  bool attention = true;
  bool global = true;
};

struct Result {
  Vec probs;
  Vec alpha;
  std::vector<int> ch1;
  std::vector<int> ch2;
  double branch = 0.0;
  double final_prob = 0.0;
  double l1 = 0.0, l2 = 0.0, l3 = 0.0, total = 0.0;
};

inline double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double nll(double p, int y) {
  const double q = std::min(std::max(p, 1e-7), 1.0 - 1e-7);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

// x (1×in) times W (in×out) plus b (1×out).
inline Vec layer(const Vec& x, const Mat& w, const Mat& b) {
  Vec out(w[0].size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double acc = b[0][j];
    for (std::size_t m = 0; m < x.size(); ++m) {
      acc += x[m] * w[m][j];
    }
    out[j] = acc;
  }
  return out;
}

inline Vec no_bias_layer(const Vec& x, const Mat& w) {
  Mat zero(1, Vec(w[0].size(), 0.0));
  return layer(x, w, zero);
}

inline double mlp_relu_sigmoid(const Vec& x, const Weights& p, const std::string& prefix) {
  Vec h = layer(x, p[prefix + ".w1"], p[prefix + ".b1"]);
  for (double& v : h) {
    v = v > 0.0 ? v : 0.0;
  }
  return sig(layer(h, p[prefix + ".w2"], p[prefix + ".b2"])[0]);
}

inline Vec soft(const Vec& s) {
  double mx = s[0];
  for (double v : s) {
    mx = v > mx ? v : mx;
  }
  Vec e(s.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    e[i] = std::exp(s[i] - mx);
    z += e[i];
  }
  for (double& v : e) {
    v /= z;
  }
  return e;
}

// Repeated argmax with strict '>' so the lowest index wins ties; `largest`
// false picks minima instead.
inline std::vector<int> pick(const Vec& v, int k, bool largest) {
  std::vector<bool> used(v.size(), false);
  std::vector<int> out;
  const int take = std::min<int>(k, static_cast<int>(v.size()));
  for (int r = 0; r < take; ++r) {
    int best = -1;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (used[i]) {
        continue;
      }
      if (best < 0 || (largest ? v[i] > v[best] : v[i] < v[best])) {
        best = static_cast<int>(i);
      }
    }
    used[best] = true;
    out.push_back(best);
  }
  return out;
}

inline Result forward(const Weights& p, const Mat& x, int y, const Options& o) {
  Result r;
  const int K = static_cast<int>(x.size());
  Mat fused_rows;
  if (o.distill) {
    // Instance channel.
    for (int i = 0; i < K; ++i) {
      r.probs.push_back(mlp_relu_sigmoid(x[i], p, "mlp1"));
    }
    std::vector<int> positive = pick(r.probs, o.max_pn ? o.k / 2 : o.k, true);
    double l1 = 0.0;
    for (int i : positive) {
      l1 += nll(r.probs[i], y);
    }
    r.l1 = l1 / static_cast<double>(positive.size());
    r.ch1 = positive;
    if (o.max_pn) {
      for (int i : pick(r.probs, o.k / 2, false)) {
        r.ch1.push_back(i);
      }
    }
    for (int i : r.ch1) {
      fused_rows.push_back(x[i]);
    }
    // Attention channel.
    if (o.attention) {
      Vec scores;
      for (int i = 0; i < K; ++i) {
        Vec h = layer(x[i], p["mlp2.w1"], p["mlp2.b1"]);
        for (double& v : h) {
          v = std::tanh(v);
        }
        scores.push_back(no_bias_layer(h, p["mlp2.w2"])[0]);
      }
      r.alpha = soft(scores);
      Vec pooled(x[0].size(), 0.0);
      for (int i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < pooled.size(); ++j) {
          pooled[j] += r.alpha[i] * x[i][j];
        }
      }
      r.branch = sig(layer(pooled, p["mlp3.w"], p["mlp3.b"])[0]);
      r.l2 = nll(r.branch, y);
      r.ch2 = pick(r.alpha, o.k, true);
      for (int i : r.ch2) {
        fused_rows.push_back(x[i]);
      }
    }
  } else {
    fused_rows = x;
  }

  // Fusion.
  const std::size_t m = fused_rows.size();
  Vec w(m, 1.0 / static_cast<double>(m));
  if (o.gated) {
    Vec scores;
    for (const Vec& f : fused_rows) {
      Vec a = layer(f, p["fusion.V"], p["fusion.bV"]);
      Vec b = layer(f, p["fusion.U"], p["fusion.bU"]);
      Vec g(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) {
        g[j] = std::tanh(a[j]) * sig(b[j]);
      }
      scores.push_back(no_bias_layer(g, p["fusion.w"])[0]);
    }
    w = soft(scores);
  }
  Vec feature(fused_rows[0].size(), 0.0);
  for (std::size_t r2 = 0; r2 < m; ++r2) {
    for (std::size_t j = 0; j < feature.size(); ++j) {
      feature[j] += w[r2] * fused_rows[r2][j];
    }
  }
  r.final_prob = mlp_relu_sigmoid(feature, p, "mlp4");
  r.l3 = nll(r.final_prob, y);
  if (!o.distill) {
    r.total = r.l3;
  } else if (o.global) {
    r.total = (r.l1 + r.l2) * std::exp(-std::fabs(r.l3)) + r.l3;
  } else {
    r.total = r.l1 + r.l2 + r.l3;
  }
  return r;
}

}  // namespace oracle

#endif  // AFDMIL_TESTS_ORACLE_STRAIGHT_LINE_HPP
