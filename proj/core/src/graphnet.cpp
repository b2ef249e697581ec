#include "parabox/graphnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <vector>

#include "parabox/rng.hpp"

namespace parabox {

namespace {

void validate_config(const GcnConfig& cfg) {
  if (cfg.steps < 1)
    throw std::invalid_argument("GcnConfig.steps must be at least 1");
  if (cfg.hidden_width < 1)
    throw std::invalid_argument("GcnConfig.hidden_width must be positive");
  if (cfg.heads < 1 || cfg.hidden_width % cfg.heads != 0)
    throw std::invalid_argument(
        "GcnConfig.hidden_width must be divisible by heads");
  if (cfg.input_width < 1)
    throw std::invalid_argument("GcnConfig.input_width must be positive");
}

// Directed neighbor pairs in CSR form; pair p covers (target[p], source[p])
// with targets grouped and sorted, sources ascending inside each group.
struct Pairs {
  std::vector<int> offset;  // n + 1
  std::vector<int> source;
  std::vector<int> target;
};

Pairs build_pairs(const PageGraph& g) {
  Pairs pr;
  const auto adj = g.adjacency();
  pr.offset.assign(g.node_count + 1, 0);
  for (int v = 0; v < g.node_count; ++v)
    pr.offset[v + 1] = pr.offset[v] + (int)adj[v].size();
  pr.source.reserve(pr.offset.back());
  pr.target.reserve(pr.offset.back());
  for (int v = 0; v < g.node_count; ++v)
    for (int w : adj[v]) {
      pr.target.push_back(v);
      pr.source.push_back(w);
    }
  return pr;
}

// y = W [x1 ; x2] + b with 64-bit accumulation; x2 may be empty.
template <typename Real>
void affine(const TensorT<Real>& W, const TensorT<Real>& b, const Real* x1,
            int n1, const Real* x2, int n2, Real* out) {
  for (int r = 0; r < W.rows; ++r) {
    double acc = b.v.empty() ? 0.0 : (double)b.at(r, 0);
    const Real* wr = W.row(r);
    for (int c = 0; c < n1; ++c) acc += (double)wr[c] * (double)x1[c];
    for (int c = 0; c < n2; ++c) acc += (double)wr[n1 + c] * (double)x2[c];
    out[r] = (Real)acc;
  }
}

template <typename Real>
void relu_inplace(Real* x, int n) {
  for (int i = 0; i < n; ++i)
    if (x[i] < Real(0)) x[i] = Real(0);
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// ln(1 + e^z) without overflow
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Everything the backward pass needs from one page's forward pass.
template <typename Real>
struct PageForward {
  Pairs pairs;
  std::vector<TensorT<Real>> h;      // steps+1 entries, n x H, post-ReLU
  std::vector<TensorT<Real>> q, k;   // per step, n x H (attention only)
  std::vector<TensorT<Real>> msg;    // per step, pairs x H, post-ReLU
  std::vector<TensorT<Real>> alpha;  // per step, pairs x heads
  std::vector<TensorT<Real>> agg;    // per step, n x H
  TensorT<Real> efwd, erev, estate;  // edge head stages, edges x H
  std::vector<double> logits;        // one per output item
};

template <typename Real>
PageForward<Real> run_forward(const GcnModelT<Real>& m, const FeatureMatrix& X,
                              const PageGraph& g, ForwardTrace* trace) {
  const GcnConfig& cfg = m.config;
  if (X.cols != cfg.input_width)
    throw std::invalid_argument("forward: feature width does not match input_width");
  if (X.rows != g.node_count)
    throw std::invalid_argument("forward: feature rows do not match node count");
  validate_config(cfg);

  const int n = g.node_count;
  const int H = cfg.hidden_width;
  const int heads = cfg.heads;
  const int dh = H / heads;
  const double scale = 1.0 / std::sqrt((double)dh);

  PageForward<Real> f;
  f.pairs = build_pairs(g);
  const int P = (int)f.pairs.source.size();

  // references into these stay live across the step loop
  f.h.reserve(cfg.steps + 1);
  f.msg.reserve(cfg.steps);
  f.alpha.reserve(cfg.steps);
  f.agg.reserve(cfg.steps);
  f.q.reserve(cfg.steps);
  f.k.reserve(cfg.steps);

  // input projection
  f.h.emplace_back(n, H);
  {
    std::vector<Real> x((size_t)cfg.input_width);
    for (int v = 0; v < n; ++v) {
      for (int c = 0; c < X.cols; ++c) x[c] = (Real)X.at(v, c);
      affine(m.win, m.bin, x.data(), cfg.input_width, (const Real*)nullptr, 0,
             f.h[0].row(v));
      relu_inplace(f.h[0].row(v), H);
    }
  }

  for (int t = 0; t < cfg.steps; ++t) {
    const auto& sw = m.steps[t];
    const TensorT<Real>& h = f.h[t];
    f.msg.emplace_back(P, H);
    f.alpha.emplace_back(P, heads);
    f.agg.emplace_back(n, H);
    TensorT<Real>& msg = f.msg[t];
    TensorT<Real>& alpha = f.alpha[t];
    TensorT<Real>& agg = f.agg[t];

    for (int p = 0; p < P; ++p) {
      affine(sw.wm, sw.bm, h.row(f.pairs.target[p]), H, h.row(f.pairs.source[p]),
             H, msg.row(p));
      relu_inplace(msg.row(p), H);
    }

    if (cfg.pooling == Pooling::attention) {
      f.q.emplace_back(n, H);
      f.k.emplace_back(n, H);
      for (int v = 0; v < n; ++v) {
        affine(sw.wq, TensorT<Real>(), h.row(v), H, (const Real*)nullptr, 0,
               f.q[t].row(v));
        affine(sw.wk, TensorT<Real>(), h.row(v), H, (const Real*)nullptr, 0,
               f.k[t].row(v));
      }
      std::vector<double> e;
      for (int v = 0; v < n; ++v) {
        const int lo = f.pairs.offset[v], hi = f.pairs.offset[v + 1];
        if (lo == hi) continue;
        const Real* qv = f.q[t].row(v);
        for (int hd = 0; hd < heads; ++hd) {
          e.assign(hi - lo, 0.0);
          for (int p = lo; p < hi; ++p) {
            const Real* kw = f.k[t].row(f.pairs.source[p]);
            double acc = 0.0;
            for (int i = hd * dh; i < (hd + 1) * dh; ++i)
              acc += (double)qv[i] * (double)kw[i];
            e[p - lo] = acc * scale;
          }
          double mx = *std::max_element(e.begin(), e.end());
          double z = 0.0;
          for (double& t2 : e) {
            t2 = std::exp(t2 - mx);
            z += t2;
          }
          for (int p = lo; p < hi; ++p) alpha.at(p, hd) = (Real)(e[p - lo] / z);
        }
      }
    } else {
      for (int v = 0; v < n; ++v) {
        const int lo = f.pairs.offset[v], hi = f.pairs.offset[v + 1];
        if (lo == hi) continue;
        const Real w = (Real)(1.0 / (double)(hi - lo));
        for (int p = lo; p < hi; ++p)
          for (int hd = 0; hd < heads; ++hd) alpha.at(p, hd) = w;
      }
    }

    for (int v = 0; v < n; ++v) {
      const int lo = f.pairs.offset[v], hi = f.pairs.offset[v + 1];
      Real* av = agg.row(v);
      for (int i = 0; i < H; ++i) {
        double acc = 0.0;
        for (int p = lo; p < hi; ++p)
          acc += (double)alpha.at(p, i / dh) * (double)msg.at(p, i);
        av[i] = (Real)acc;
      }
    }

    f.h.emplace_back(n, H);
    for (int v = 0; v < n; ++v) {
      affine(sw.wu, sw.bu, h.row(v), H, agg.row(v), H, f.h[t + 1].row(v));
      relu_inplace(f.h[t + 1].row(v), H);
    }
  }

  const TensorT<Real>& hT = f.h[cfg.steps];
  if (cfg.head_type == HeadType::node_binary_pair) {
    std::vector<Real> z(2);
    for (int v = 0; v < n; ++v) {
      affine(m.whead, m.bhead, hT.row(v), H, (const Real*)nullptr, 0, z.data());
      f.logits.push_back((double)z[0]);
      f.logits.push_back((double)z[1]);
    }
  } else {
    const int E = (int)g.edges.size();
    f.efwd = TensorT<Real>(E, H);
    f.erev = TensorT<Real>(E, H);
    f.estate = TensorT<Real>(E, H);
    Real z;
    for (int e = 0; e < E; ++e) {
      const int u = g.edges[e].u, v = g.edges[e].v;
      affine(m.wedge, m.bedge, hT.row(u), H, hT.row(v), H, f.efwd.row(e));
      relu_inplace(f.efwd.row(e), H);
      affine(m.wedge, m.bedge, hT.row(v), H, hT.row(u), H, f.erev.row(e));
      relu_inplace(f.erev.row(e), H);
      for (int i = 0; i < H; ++i)
        f.estate.at(e, i) = (f.efwd.at(e, i) + f.erev.at(e, i)) / Real(2);
      affine(m.whead, m.bhead, f.estate.row(e), H, (const Real*)nullptr, 0, &z);
      f.logits.push_back((double)z);
    }
  }

  if (trace) {
    trace->pair_target.assign(cfg.steps, f.pairs.target);
    trace->alpha.clear();
    trace->messages.clear();
    trace->hidden.clear();
    for (int t = 0; t < cfg.steps; ++t) {
      TensorT<double> a(P, heads), mm(n, H);
      for (int p = 0; p < P; ++p)
        for (int hd = 0; hd < heads; ++hd) a.at(p, hd) = (double)f.alpha[t].at(p, hd);
      for (int v = 0; v < n; ++v)
        for (int i = 0; i < H; ++i) mm.at(v, i) = (double)f.agg[t].at(v, i);
      trace->alpha.push_back(std::move(a));
      trace->messages.push_back(std::move(mm));
    }
    for (const auto& h : f.h) {
      TensorT<double> hh(h.rows, h.cols);
      for (size_t i = 0; i < h.v.size(); ++i) hh.v[i] = (double)h.v[i];
      trace->hidden.push_back(std::move(hh));
    }
  }
  return f;
}

template <typename Real>
std::vector<double> probabilities(const PageForward<Real>& f) {
  std::vector<double> out;
  out.reserve(f.logits.size());
  for (double z : f.logits) out.push_back(sigmoid(z));
  return out;
}

Gradients zero_gradients(const GcnConfig& cfg) {
  Gradients g;
  g.config = cfg;
  const int H = cfg.hidden_width;
  g.win = TensorT<double>(H, cfg.input_width);
  g.bin = TensorT<double>(H, 1);
  g.steps.resize(cfg.steps);
  for (auto& s : g.steps) {
    s.wm = TensorT<double>(H, 2 * H);
    s.bm = TensorT<double>(H, 1);
    s.wu = TensorT<double>(H, 2 * H);
    s.bu = TensorT<double>(H, 1);
    s.wq = TensorT<double>(H, H);
    s.wk = TensorT<double>(H, H);
  }
  if (cfg.head_type == HeadType::edge_binary) {
    g.wedge = TensorT<double>(H, 2 * H);
    g.bedge = TensorT<double>(H, 1);
    g.whead = TensorT<double>(1, H);
    g.bhead = TensorT<double>(1, 1);
  } else {
    g.whead = TensorT<double>(2, H);
    g.bhead = TensorT<double>(2, 1);
  }
  return g;
}

// Backward pass for one page; dlogit holds dL/dz per output item.  Gradients
// accumulate in 64-bit regardless of the engine precision.
template <typename Real>
void run_backward(const GcnModelT<Real>& m, const FeatureMatrix& X,
                  const PageGraph& g, const PageForward<Real>& f,
                  const std::vector<double>& dlogit, Gradients& gr) {
  const GcnConfig& cfg = m.config;
  const int n = g.node_count;
  const int H = cfg.hidden_width;
  const int heads = cfg.heads;
  const int dh = H / heads;
  const double scale = 1.0 / std::sqrt((double)dh);
  const int P = (int)f.pairs.source.size();

  TensorT<double> dhid(n, H);  // dL/dh for the layer being unwound
  const TensorT<Real>& hT = f.h[cfg.steps];

  if (cfg.head_type == HeadType::node_binary_pair) {
    for (int v = 0; v < n; ++v)
      for (int j = 0; j < 2; ++j) {
        const double dz = dlogit[(size_t)v * 2 + j];
        if (dz == 0.0) continue;
        gr.bhead.at(j, 0) += dz;
        for (int i = 0; i < H; ++i) {
          gr.whead.at(j, i) += dz * (double)hT.at(v, i);
          dhid.at(v, i) += dz * (double)m.whead.at(j, i);
        }
      }
  } else {
    std::vector<double> dpre(H);
    for (size_t e = 0; e < g.edges.size(); ++e) {
      const double dz = dlogit[e];
      const int u = g.edges[e].u, v = g.edges[e].v;
      gr.bhead.at(0, 0) += dz;
      for (int i = 0; i < H; ++i)
        gr.whead.at(0, i) += dz * (double)f.estate.at((int)e, i);
      // both directed evaluations feed the mean with weight 1/2
      for (int dir = 0; dir < 2; ++dir) {
        const TensorT<Real>& act = dir == 0 ? f.efwd : f.erev;
        const int a = dir == 0 ? u : v;
        const int b = dir == 0 ? v : u;
        for (int i = 0; i < H; ++i)
          dpre[i] = act.at((int)e, i) > Real(0)
                        ? dz * (double)m.whead.at(0, i) / 2.0
                        : 0.0;
        for (int r = 0; r < H; ++r) {
          if (dpre[r] == 0.0) continue;
          gr.bedge.at(r, 0) += dpre[r];
          for (int c = 0; c < H; ++c) {
            gr.wedge.at(r, c) += dpre[r] * (double)hT.at(a, c);
            gr.wedge.at(r, H + c) += dpre[r] * (double)hT.at(b, c);
            dhid.at(a, c) += dpre[r] * (double)m.wedge.at(r, c);
            dhid.at(b, c) += dpre[r] * (double)m.wedge.at(r, H + c);
          }
        }
      }
    }
  }

  std::vector<double> dupre(H), dagg(H), dmrow(H);
  TensorT<double> dmsg, dq, dk;
  for (int t = cfg.steps - 1; t >= 0; --t) {
    const auto& sw = m.steps[t];
    auto& gw = gr.steps[t];
    const TensorT<Real>& h = f.h[t];
    const TensorT<Real>& hnext = f.h[t + 1];
    TensorT<double> dprev(n, H);
    dmsg = TensorT<double>(P, H);
    const bool attention = cfg.pooling == Pooling::attention;
    if (attention) {
      dq = TensorT<double>(n, H);
      dk = TensorT<double>(n, H);
    }

    for (int v = 0; v < n; ++v) {
      // update net
      for (int i = 0; i < H; ++i)
        dupre[i] = hnext.at(v, i) > Real(0) ? dhid.at(v, i) : 0.0;
      std::fill(dagg.begin(), dagg.end(), 0.0);
      for (int r = 0; r < H; ++r) {
        if (dupre[r] == 0.0) continue;
        gw.bu.at(r, 0) += dupre[r];
        for (int c = 0; c < H; ++c) {
          gw.wu.at(r, c) += dupre[r] * (double)h.at(v, c);
          gw.wu.at(r, H + c) += dupre[r] * (double)f.agg[t].at(v, c);
          dprev.at(v, c) += dupre[r] * (double)sw.wu.at(r, c);
          dagg[c] += dupre[r] * (double)sw.wu.at(r, H + c);
        }
      }

      // aggregation
      const int lo = f.pairs.offset[v], hi = f.pairs.offset[v + 1];
      if (lo == hi) continue;
      for (int hd = 0; hd < heads; ++hd) {
        if (attention) {
          // dalpha, then softmax and the scaled dot products
          double s = 0.0;
          std::vector<double> dal(hi - lo);
          for (int p = lo; p < hi; ++p) {
            double acc = 0.0;
            for (int i = hd * dh; i < (hd + 1) * dh; ++i)
              acc += dagg[i] * (double)f.msg[t].at(p, i);
            dal[p - lo] = acc;
            s += acc * (double)f.alpha[t].at(p, hd);
          }
          const Real* qv = f.q[t].row(v);
          for (int p = lo; p < hi; ++p) {
            const double de =
                (double)f.alpha[t].at(p, hd) * (dal[p - lo] - s) * scale;
            if (de == 0.0) continue;
            const int w = f.pairs.source[p];
            const Real* kw = f.k[t].row(w);
            for (int i = hd * dh; i < (hd + 1) * dh; ++i) {
              dq.at(v, i) += de * (double)kw[i];
              dk.at(w, i) += de * (double)qv[i];
            }
          }
        }
        for (int p = lo; p < hi; ++p) {
          const double a = (double)f.alpha[t].at(p, hd);
          for (int i = hd * dh; i < (hd + 1) * dh; ++i)
            dmsg.at(p, i) += a * dagg[i];
        }
      }
    }

    if (attention) {
      for (int v = 0; v < n; ++v)
        for (int r = 0; r < H; ++r) {
          const double dqr = dq.at(v, r), dkr = dk.at(v, r);
          if (dqr != 0.0) {
            for (int c = 0; c < H; ++c) {
              gw.wq.at(r, c) += dqr * (double)h.at(v, c);
              dprev.at(v, c) += dqr * (double)sw.wq.at(r, c);
            }
          }
          if (dkr != 0.0) {
            for (int c = 0; c < H; ++c) {
              gw.wk.at(r, c) += dkr * (double)h.at(v, c);
              dprev.at(v, c) += dkr * (double)sw.wk.at(r, c);
            }
          }
        }
    }

    for (int p = 0; p < P; ++p) {
      const int v = f.pairs.target[p], w = f.pairs.source[p];
      bool any = false;
      for (int i = 0; i < H; ++i) {
        dmrow[i] = f.msg[t].at(p, i) > Real(0) ? dmsg.at(p, i) : 0.0;
        any = any || dmrow[i] != 0.0;
      }
      if (!any) continue;
      for (int r = 0; r < H; ++r) {
        if (dmrow[r] == 0.0) continue;
        gw.bm.at(r, 0) += dmrow[r];
        for (int c = 0; c < H; ++c) {
          gw.wm.at(r, c) += dmrow[r] * (double)h.at(v, c);
          gw.wm.at(r, H + c) += dmrow[r] * (double)h.at(w, c);
          dprev.at(v, c) += dmrow[r] * (double)sw.wm.at(r, c);
          dprev.at(w, c) += dmrow[r] * (double)sw.wm.at(r, H + c);
        }
      }
    }

    dhid = std::move(dprev);
  }

  for (int v = 0; v < n; ++v)
    for (int r = 0; r < H; ++r) {
      const double d = f.h[0].at(v, r) > Real(0) ? dhid.at(v, r) : 0.0;
      if (d == 0.0) continue;
      gr.bin.at(r, 0) += d;
      for (int c = 0; c < cfg.input_width; ++c)
        gr.win.at(r, c) += d * X.at(v, c);
    }
}

// weight per labeled item under the configured class balance
inline double item_weight(signed char label, const TrainConfig& tc) {
  if (label < 0) return 0.0;
  return label ? tc.weight_positive : tc.weight_negative;
}

size_t expected_items(const GcnConfig& cfg, const LabeledPage& page) {
  return cfg.head_type == HeadType::node_binary_pair
             ? (size_t)page.graph.node_count * 2
             : page.graph.edges.size();
}

template <typename Real>
std::pair<double, Gradients> loss_impl(const GcnModelT<Real>& m,
                                       const std::vector<LabeledPage>& batch,
                                       const TrainConfig& tc, bool want_grads) {
  Gradients grads = zero_gradients(m.config);
  std::vector<PageForward<Real>> fwd;
  fwd.reserve(batch.size());
  size_t n_items = 0;
  double loss_sum = 0.0;
  for (const auto& page : batch) {
    if (page.labels.size() != expected_items(m.config, page))
      throw std::invalid_argument("loss: labels are not aligned with the page");
    fwd.push_back(run_forward(m, page.features, page.graph, nullptr));
    const auto& f = fwd.back();
    for (size_t i = 0; i < page.labels.size(); ++i) {
      const double w = item_weight(page.labels[i], tc);
      if (w == 0.0) continue;
      const double z = f.logits[i];
      loss_sum += w * (softplus(z) - (page.labels[i] ? z : 0.0));
      ++n_items;
    }
  }
  if (n_items == 0) return {0.0, grads};
  const double loss = loss_sum / (double)n_items;
  if (!want_grads) return {loss, grads};

  for (size_t pi = 0; pi < batch.size(); ++pi) {
    const auto& page = batch[pi];
    const auto& f = fwd[pi];
    std::vector<double> dlogit(page.labels.size(), 0.0);
    for (size_t i = 0; i < page.labels.size(); ++i) {
      const double w = item_weight(page.labels[i], tc);
      if (w == 0.0) continue;
      const double y = page.labels[i] ? 1.0 : 0.0;
      dlogit[i] = w * (sigmoid(f.logits[i]) - y) / (double)n_items;
    }
    run_backward(m, page.features, page.graph, f, dlogit, grads);
  }
  return {loss, grads};
}

std::vector<std::string> tensor_names(const GcnConfig& cfg) {
  std::vector<std::string> names = {"win", "bin"};
  for (int t = 0; t < cfg.steps; ++t)
    for (const char* part : {"wm", "bm", "wu", "bu", "wq", "wk"})
      names.push_back("step" + std::to_string(t) + "." + part);
  if (cfg.head_type == HeadType::edge_binary) {
    names.push_back("wedge");
    names.push_back("bedge");
  }
  names.push_back("whead");
  names.push_back("bhead");
  return names;
}

}  // namespace

GcnModel init_model(const GcnConfig& cfg, uint64_t seed) {
  validate_config(cfg);
  GcnModel m;
  m.config = cfg;
  const int H = cfg.hidden_width;
  m.win = Tensor(H, cfg.input_width);
  m.bin = Tensor(H, 1);
  m.steps.resize(cfg.steps);
  for (auto& s : m.steps) {
    s.wm = Tensor(H, 2 * H);
    s.bm = Tensor(H, 1);
    s.wu = Tensor(H, 2 * H);
    s.bu = Tensor(H, 1);
    s.wq = Tensor(H, H);
    s.wk = Tensor(H, H);
  }
  if (cfg.head_type == HeadType::edge_binary) {
    m.wedge = Tensor(H, 2 * H);
    m.bedge = Tensor(H, 1);
    m.whead = Tensor(1, H);
    m.bhead = Tensor(1, 1);
  } else {
    m.whead = Tensor(2, H);
    m.bhead = Tensor(2, 1);
  }

  // uniform fan-balanced init; attention projections get a small gain so
  // early-training attention stays near uniform.  Hidden-layer biases start
  // slightly positive: with zero biases a unit fed only by dead units has a
  // pre-activation of exactly zero, parking it on the ReLU kink where the
  // derivative is ill-defined and training cannot revive it.
  Rng rng(seed);
  auto fill = [&rng](Tensor& t, double gain) {
    const double bound = gain * std::sqrt(6.0 / (double)(t.rows + t.cols));
    for (auto& x : t.v) x = (float)rng.uniform(-bound, bound);
  };
  auto lift = [](Tensor& t) { std::fill(t.v.begin(), t.v.end(), 0.01f); };
  fill(m.win, 1.0);
  lift(m.bin);
  for (auto& s : m.steps) {
    fill(s.wm, 1.0);
    lift(s.bm);
    fill(s.wu, 1.0);
    lift(s.bu);
    fill(s.wq, 0.1);
    fill(s.wk, 0.1);
  }
  if (cfg.head_type == HeadType::edge_binary) {
    fill(m.wedge, 1.0);
    lift(m.bedge);
  }
  fill(m.whead, 1.0);
  return m;
}

GcnModelD widen(const GcnModel& model) {
  GcnModelD d;
  d.config = model.config;
  auto wide = [](const Tensor& t) {
    TensorT<double> out(t.rows, t.cols);
    for (size_t i = 0; i < t.v.size(); ++i) out.v[i] = (double)t.v[i];
    return out;
  };
  d.win = wide(model.win);
  d.bin = wide(model.bin);
  d.steps.resize(model.steps.size());
  for (size_t i = 0; i < model.steps.size(); ++i) {
    d.steps[i].wm = wide(model.steps[i].wm);
    d.steps[i].bm = wide(model.steps[i].bm);
    d.steps[i].wu = wide(model.steps[i].wu);
    d.steps[i].bu = wide(model.steps[i].bu);
    d.steps[i].wq = wide(model.steps[i].wq);
    d.steps[i].wk = wide(model.steps[i].wk);
  }
  d.wedge = wide(model.wedge);
  d.bedge = wide(model.bedge);
  d.whead = wide(model.whead);
  d.bhead = wide(model.bhead);
  return d;
}

std::vector<double> forward(const GcnModel& m, const FeatureMatrix& X,
                            const PageGraph& g) {
  return probabilities(run_forward(m, X, g, nullptr));
}

std::vector<double> forward(const GcnModelD& m, const FeatureMatrix& X,
                            const PageGraph& g) {
  return probabilities(run_forward(m, X, g, nullptr));
}

std::vector<double> forward_traced(const GcnModelD& m, const FeatureMatrix& X,
                                   const PageGraph& g, ForwardTrace* trace) {
  return probabilities(run_forward(m, X, g, trace));
}

TensorT<double> node_to_edge(const GcnModelD& m, const TensorT<double>& hidden,
                             const std::vector<std::pair<int, int>>& endpoints) {
  const int H = m.config.hidden_width;
  if (hidden.cols != H)
    throw std::invalid_argument("node_to_edge: hidden width mismatch");
  TensorT<double> out((int)endpoints.size(), H);
  std::vector<double> a(H), b(H);
  for (size_t e = 0; e < endpoints.size(); ++e) {
    const auto [u, v] = endpoints[e];
    affine(m.wedge, m.bedge, hidden.row(u), H, hidden.row(v), H, a.data());
    relu_inplace(a.data(), H);
    affine(m.wedge, m.bedge, hidden.row(v), H, hidden.row(u), H, b.data());
    relu_inplace(b.data(), H);
    for (int i = 0; i < H; ++i) out.at((int)e, i) = (a[i] + b[i]) / 2.0;
  }
  return out;
}

double batch_loss(const GcnModel& m, const std::vector<LabeledPage>& batch,
                  const TrainConfig& tc) {
  return loss_impl(m, batch, tc, false).first;
}

double batch_loss(const GcnModelD& m, const std::vector<LabeledPage>& batch,
                  const TrainConfig& tc) {
  return loss_impl(m, batch, tc, false).first;
}

std::pair<double, Gradients> loss_and_gradients(const GcnModel& m,
                                                const std::vector<LabeledPage>& batch,
                                                const TrainConfig& tc) {
  return loss_impl(m, batch, tc, true);
}

std::pair<double, Gradients> loss_and_gradients(const GcnModelD& m,
                                                const std::vector<LabeledPage>& batch,
                                                const TrainConfig& tc) {
  return loss_impl(m, batch, tc, true);
}

AdamState init_adam(const GcnModel& model) {
  AdamState st;
  model.visit([&](const Tensor& t) {
    st.m.emplace_back(t.rows, t.cols);
    st.v.emplace_back(t.rows, t.cols);
  });
  return st;
}

bool apply_update(GcnModel& model, const Gradients& grads, AdamState& st,
                  const TrainConfig& tc, std::string* diagnostic) {
  std::vector<Tensor*> wt;
  model.visit([&](Tensor& t) { wt.push_back(&t); });
  std::vector<const TensorT<double>*> gt;
  grads.visit([&](const TensorT<double>& t) { gt.push_back(&t); });
  if (wt.size() != gt.size() || wt.size() != st.m.size())
    throw std::invalid_argument("apply_update: gradient shapes do not match");

  const auto names = tensor_names(model.config);
  ++st.step;
  for (size_t i = 0; i < gt.size(); ++i) {
    if (wt[i]->v.size() != gt[i]->v.size())
      throw std::invalid_argument("apply_update: gradient shapes do not match");
    for (double gv : gt[i]->v)
      if (!std::isfinite(gv)) {
        if (diagnostic)
          *diagnostic = "non-finite gradient in " +
                        (i < names.size() ? names[i] : "tensor " + std::to_string(i)) +
                        "; update skipped";
        return false;
      }
  }

  const double bc1 = 1.0 - std::pow(tc.beta1, (double)st.step);
  const double bc2 = 1.0 - std::pow(tc.beta2, (double)st.step);
  for (size_t i = 0; i < gt.size(); ++i) {
    auto& mo = st.m[i].v;
    auto& vo = st.v[i].v;
    auto& w = wt[i]->v;
    const auto& gv = gt[i]->v;
    for (size_t j = 0; j < w.size(); ++j) {
      mo[j] = tc.beta1 * mo[j] + (1.0 - tc.beta1) * gv[j];
      vo[j] = tc.beta2 * vo[j] + (1.0 - tc.beta2) * gv[j] * gv[j];
      const double mhat = mo[j] / bc1;
      const double vhat = vo[j] / bc2;
      w[j] = (float)((double)w[j] -
                     tc.learning_rate * mhat / (std::sqrt(vhat) + tc.epsilon));
    }
  }
  return true;
}

}  // namespace parabox
