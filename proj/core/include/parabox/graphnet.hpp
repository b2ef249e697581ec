#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parabox/geometry.hpp"

namespace parabox {

enum class Pooling { average, attention };
enum class HeadType { node_binary_pair, edge_binary };

// Shapes of the message-passing network.  hidden_width must be divisible by
// heads; each attention head scores a hidden_width/heads slice.
struct GcnConfig {
  int steps = 8;
  int hidden_width = 32;
  int heads = 4;
  Pooling pooling = Pooling::attention;
  HeadType head_type = HeadType::node_binary_pair;
  int input_width = 29;
};

// Row-major matrix.  Float for stored weights, double for the reference
// engine and for gradients.
template <typename T>
struct TensorT {
  int rows = 0;
  int cols = 0;
  std::vector<T> v;

  TensorT() = default;
  TensorT(int r, int c) : rows(r), cols(c), v((size_t)r * c, T(0)) {}
  T& at(int r, int c) { return v[(size_t)r * cols + c]; }
  const T& at(int r, int c) const { return v[(size_t)r * cols + c]; }
  T* row(int r) { return v.data() + (size_t)r * cols; }
  const T* row(int r) const { return v.data() + (size_t)r * cols; }
};

using Tensor = TensorT<float>;
using FeatureMatrix = TensorT<double>;

// One round of message passing: message net M, update net U, and per-head
// attention projections (query/key rows grouped by head).
template <typename T>
struct StepWeightsT {
  TensorT<T> wm, bm;  // hidden x 2*hidden, hidden x 1
  TensorT<T> wu, bu;  // hidden x 2*hidden, hidden x 1
  TensorT<T> wq, wk;  // hidden x hidden each
};

template <typename T>
struct GcnModelT {
  GcnConfig config;
  TensorT<T> win, bin;                 // input projection
  std::vector<StepWeightsT<T>> steps;  // one entry per message-passing round
  TensorT<T> wedge, bedge;             // node-to-edge net, edge_binary only
  TensorT<T> whead, bhead;             // output logits

  // Applies fn to every weight tensor in a fixed order; serialization, the
  // optimizer and the finite-difference check all walk the same sequence.
  template <typename Fn>
  void visit(Fn&& fn) {
    fn(win);
    fn(bin);
    for (auto& s : steps) {
      fn(s.wm);
      fn(s.bm);
      fn(s.wu);
      fn(s.bu);
      fn(s.wq);
      fn(s.wk);
    }
    if (config.head_type == HeadType::edge_binary) {
      fn(wedge);
      fn(bedge);
    }
    fn(whead);
    fn(bhead);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    const_cast<GcnModelT*>(this)->visit(
        [&fn](auto& t) { fn(const_cast<const TensorT<T>&>(t)); });
  }
};

using GcnModel = GcnModelT<float>;
using GcnModelD = GcnModelT<double>;
using Gradients = GcnModelT<double>;

GcnModel init_model(const GcnConfig& config, uint64_t seed);

// Widened copy for the 64-bit reference engine and the gradient check.
GcnModelD widen(const GcnModel& model);

// Per-item labels: 1 positive, 0 negative, -1 don't-care (weight 0).  The
// node_binary_pair head has two items per node, row-major (start, end); the
// edge_binary head has one item per graph edge.
struct LabeledPage {
  PageGraph graph;
  FeatureMatrix features;  // node_count x input_width
  std::vector<signed char> labels;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 8;
  int epochs = 40;
  double weight_positive = 1.0;
  double weight_negative = 1.0;
  uint64_t seed = 0;
};

// Forward pass on a single page.  node_binary_pair: node_count x 2 row-major
// probabilities (line start, line end); edge_binary: one probability per
// graph edge.  Throws invalid_argument on a feature width mismatch.
std::vector<double> forward(const GcnModel& model, const FeatureMatrix& features,
                            const PageGraph& graph);
std::vector<double> forward(const GcnModelD& model, const FeatureMatrix& features,
                            const PageGraph& graph);

// Introspection for tests and diagnostics, reference precision.  alpha[t] is
// indexed by (directed neighbor pair, head); messages[t] is the aggregated
// per-node message before the update net.
struct ForwardTrace {
  std::vector<std::vector<int>> pair_target;    // per step: pair -> node v
  std::vector<TensorT<double>> alpha;           // per step: pairs x heads
  std::vector<TensorT<double>> messages;        // per step: nodes x hidden
  std::vector<TensorT<double>> hidden;          // steps+1 entries of h_t
};
std::vector<double> forward_traced(const GcnModelD& model,
                                   const FeatureMatrix& features,
                                   const PageGraph& graph, ForwardTrace* trace);

// Symmetric edge state (M'(h_v,h_w) + M'(h_w,h_v)) / 2 for explicit endpoint
// pairs; exposed for the symmetry tests.
TensorT<double> node_to_edge(const GcnModelD& model, const TensorT<double>& hidden,
                             const std::vector<std::pair<int, int>>& endpoints);

// Weighted binary cross-entropy over all nonzero-weight items in the batch
// plus gradients for every weight tensor, reduced in page order.  Labels of
// -1 carry weight 0 and drop out of both the average and the gradients.
double batch_loss(const GcnModel& model, const std::vector<LabeledPage>& batch,
                  const TrainConfig& config);
double batch_loss(const GcnModelD& model, const std::vector<LabeledPage>& batch,
                  const TrainConfig& config);
std::pair<double, Gradients> loss_and_gradients(const GcnModel& model,
                                                const std::vector<LabeledPage>& batch,
                                                const TrainConfig& config);
std::pair<double, Gradients> loss_and_gradients(const GcnModelD& model,
                                                const std::vector<LabeledPage>& batch,
                                                const TrainConfig& config);

struct AdamState {
  std::vector<TensorT<double>> m;
  std::vector<TensorT<double>> v;
  int64_t step = 0;
};
AdamState init_adam(const GcnModel& model);

// One adaptive-moment step.  A non-finite gradient skips the update (the
// step counter still advances) and reports the offending tensor through
// `diagnostic`; returns whether the weights changed.
bool apply_update(GcnModel& model, const Gradients& grads, AdamState& state,
                  const TrainConfig& config, std::string* diagnostic = nullptr);

// Binary model file with format version, config and checksum; round trips
// are bit-exact.  Loading verifies magic, version and checksum and names the
// failing field.  The expected-head overload also rejects a config mismatch.
void save_model(const GcnModel& model, const std::string& path);
GcnModel load_model(const std::string& path);
GcnModel load_model(const std::string& path, HeadType expected);

}  // namespace parabox
