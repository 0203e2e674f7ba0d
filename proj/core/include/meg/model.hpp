#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meg/nn.hpp"
#include "meg/package.hpp"
#include "meg/registry.hpp"
#include "meg/retrieval.hpp"

namespace meg {

/// Which modality-summary stage to run. Matching and detection stages are
/// shared; gru_seq / lstm_seq consume a branch's nodes as a sequence in
/// retrieval order and emit the final hidden state as the summary.
enum class SummaryVariant { gnn, gru_seq, lstm_seq };

SummaryVariant variant_from_string(const std::string& s);
std::string to_string(SummaryVariant v);

struct ModelConfig {
  std::size_t hidden = 64;    // H, GNN hidden width
  std::size_t node_dim = 64;  // evidence-match output width; zero-padded up to H
  std::size_t conv_width = 3;
  std::size_t timesteps = 1;
  double epsilon = 1e-8;    // zero-adjacency guard in the scaled aggregation
  bool cross_modal = true;  // complete graph across modalities vs per-modality graphs
  SummaryVariant variant = SummaryVariant::gnn;
  std::size_t detector_hidden = 64;

  void validate() const;
};

/// A query package plus its k retrieved evidence packages, in retrieval order.
struct EvidenceSet {
  const Package* query = nullptr;
  std::vector<const Package*> retrieved;

  std::size_t k() const { return retrieved.size(); }
};

/// Resolves a retrieval result against the dataset and checks the evidence
/// invariants (k >= 1, every evidence shares a modality with the query).
EvidenceSet make_evidence_set(const Package& query, const RetrievalResult& result,
                              const Dataset& dataset, bool reverse_order = false);

struct MatchCache {
  Tensor stacked;   // [2 x d] query over retrieved
  Conv1dCache conv;
  Tensor att;       // element-wise soft attention, sigmoid of the conv map
  Tensor gated_flat;
  DenseCache fc;
  Tensor x_v;  // node initialization [node_dim]
};

struct NodeCache {
  std::size_t branch = 0;  // modality index in canonical (sorted-name) order
  MatchCache match;
  Tensor h0;  // [hidden], x_v zero-padded
};

struct GnnStepCache {
  std::vector<Tensor> h_prev;
  std::vector<Tensor> a;
  std::vector<GruCache> gru;
  std::vector<double> denom;
};

struct BranchCache {
  std::vector<std::size_t> node_ids;  // indices into ForwardCache::nodes
  std::vector<DenseCache> att;        // readout gate caches (gnn)
  std::vector<GruCache> seq_gru;      // gru_seq
  std::vector<LstmCache> seq_lstm;    // lstm_seq
  Tensor summary;                     // G_m [hidden]
};

struct ForwardCache {
  std::vector<NodeCache> nodes;     // canonical order: branch asc, retrieval pos asc
  std::vector<GnnStepCache> steps;  // one per propagation timestep (gnn)
  std::vector<Tensor> h_final;      // per node, post-propagation
  std::vector<BranchCache> branches;
  Tensor concat;
  DenseCache det_hidden;
  DenseCache det_out;
  double prob = 0.0;
  bool valid = false;
};

/// The multi-evidence detection network. One branch per modality (evidence
/// matching + summary weights), a shared detector head on the concatenated
/// branch summaries. Forward is pure given (input, params) and may run
/// concurrently with frozen parameters; backward accumulates gradients into
/// the registry and is single-writer.
class MegModel {
 public:
  MegModel(const ModelConfig& config, const DatasetSchema& schema, std::uint64_t init_seed);

  /// Manipulation probability in (0,1); >= 0.5 reads "tampered" under the
  /// default threshold.
  double forward(const EvidenceSet& evidence, ForwardCache& cache) const;

  /// Accumulates dL/dparam for every branch and detector parameter, given
  /// dL/dprob. Throws std::logic_error if the cache holds no forward pass.
  void backward(const ForwardCache& cache, double dprob);

  ParamRegistry& params() { return registry_; }
  const ParamRegistry& params() const { return registry_; }
  const ModelConfig& config() const { return config_; }
  const std::vector<std::string>& modalities() const { return modalities_; }

 private:
  struct Branch {
    std::string modality;
    std::size_t feature_dim = 0;
    Conv1dLayer match_conv;
    DenseLayer match_fc;
    GruCell gru;       // gnn and gru_seq
    DenseLayer att;    // gnn readout gate
    LstmCell lstm;     // lstm_seq
    Tensor* agg_bias = nullptr;
    Tensor* agg_bias_grad = nullptr;
  };

  void match_forward(const Branch& branch, const std::vector<double>& q,
                     const std::vector<double>& r, MatchCache& cache) const;
  void match_backward(Branch& branch, const MatchCache& cache, const Tensor& dx);

  ModelConfig config_;
  std::vector<std::string> modalities_;
  std::vector<Branch> branches_;
  DenseLayer det_hidden_;
  DenseLayer det_out_;
  ParamRegistry registry_;
};

}  // namespace meg
