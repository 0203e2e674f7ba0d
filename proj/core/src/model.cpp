#include "meg/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace meg {

SummaryVariant variant_from_string(const std::string& s) {
  if (s == "gnn") return SummaryVariant::gnn;
  if (s == "gru_seq") return SummaryVariant::gru_seq;
  if (s == "lstm_seq") return SummaryVariant::lstm_seq;
  throw std::invalid_argument("unknown summary variant '" + s + "'");
}

std::string to_string(SummaryVariant v) {
  switch (v) {
    case SummaryVariant::gnn: return "gnn";
    case SummaryVariant::gru_seq: return "gru_seq";
    case SummaryVariant::lstm_seq: return "lstm_seq";
  }
  return "?";
}

void ModelConfig::validate() const {
  if (hidden == 0) throw std::invalid_argument("ModelConfig: hidden must be positive");
  if (node_dim == 0 || node_dim > hidden) {
    throw std::invalid_argument("ModelConfig: node_dim must lie in [1, hidden]");
  }
  if (conv_width % 2 == 0) throw std::invalid_argument("ModelConfig: conv_width must be odd");
  if (timesteps == 0) throw std::invalid_argument("ModelConfig: timesteps must be >= 1");
  if (epsilon <= 0.0) throw std::invalid_argument("ModelConfig: epsilon must be positive");
  if (detector_hidden == 0) throw std::invalid_argument("ModelConfig: detector_hidden must be positive");
}

EvidenceSet make_evidence_set(const Package& query, const RetrievalResult& result,
                              const Dataset& dataset, bool reverse_order) {
  EvidenceSet es;
  es.query = &query;
  es.retrieved.reserve(result.ranked.size());
  for (const auto& [id, score] : result.ranked) {
    const Package* p = dataset.find(id);
    if (!p) throw std::runtime_error("evidence set: retrieved id '" + id + "' not in dataset");
    bool overlap = false;
    for (const auto& [name, vec] : p->modalities) {
      if (query.has_modality(name)) {
        overlap = true;
        break;
      }
    }
    if (!overlap) {
      throw std::runtime_error("evidence set: package '" + id + "' shares no modality with query '" +
                               query.id + "'");
    }
    es.retrieved.push_back(p);
  }
  if (es.retrieved.empty()) throw std::runtime_error("evidence set: k must be >= 1");
  if (reverse_order) std::reverse(es.retrieved.begin(), es.retrieved.end());
  return es;
}

MegModel::MegModel(const ModelConfig& config, const DatasetSchema& schema, std::uint64_t init_seed)
    : config_(config), modalities_(schema.modality_names()) {
  config_.validate();
  if (modalities_.empty()) throw std::invalid_argument("MegModel: schema has no modalities");
  Rng init(init_seed);

  for (const std::string& m : modalities_) {
    Branch branch;
    branch.modality = m;
    branch.feature_dim = schema.modality_dims.at(m);
    const std::string prefix = "branch." + m;
    branch.match_conv = Conv1dLayer(registry_, prefix + ".match_conv", 2, 2, config_.conv_width, &init);
    branch.match_fc = DenseLayer(registry_, prefix + ".match_fc", config_.node_dim,
                                 2 * branch.feature_dim, Activation::relu, &init);
    switch (config_.variant) {
      case SummaryVariant::gnn:
        branch.gru = GruCell(registry_, prefix + ".gru", config_.hidden, &init);
        registry_.create(prefix + ".agg.bias", {config_.hidden});
        branch.agg_bias = &registry_.param(prefix + ".agg.bias");
        branch.agg_bias_grad = &registry_.grad(prefix + ".agg.bias");
        branch.att = DenseLayer(registry_, prefix + ".att", config_.hidden, config_.hidden,
                                Activation::sigmoid, &init);
        break;
      case SummaryVariant::gru_seq:
        branch.gru = GruCell(registry_, prefix + ".gru", config_.hidden, &init);
        break;
      case SummaryVariant::lstm_seq:
        branch.lstm = LstmCell(registry_, prefix + ".lstm", config_.hidden, &init);
        break;
    }
    branches_.push_back(std::move(branch));
  }

  det_hidden_ = DenseLayer(registry_, "detector.hidden", config_.detector_hidden,
                           modalities_.size() * config_.hidden, Activation::relu, &init);
  det_out_ = DenseLayer(registry_, "detector.out", 1, config_.detector_hidden,
                        Activation::sigmoid, &init);
}

void MegModel::match_forward(const Branch& branch, const std::vector<double>& q,
                             const std::vector<double>& r, MatchCache& cache) const {
  const std::size_t d = branch.feature_dim;
  if (q.size() != d || r.size() != d) {
    throw std::invalid_argument("evidence_match: feature dimension mismatch for modality '" +
                                branch.modality + "'");
  }
  cache.stacked = Tensor({2, d});
  for (std::size_t i = 0; i < d; ++i) {
    cache.stacked(0, i) = q[i];
    cache.stacked(1, i) = r[i];
  }
  Tensor conv_out = branch.match_conv.forward(cache.stacked, &cache.conv);
  cache.att = conv_out;
  for (double& v : cache.att.data) v = sigmoid(v);
  cache.gated_flat = Tensor({2 * d});
  for (std::size_t i = 0; i < 2 * d; ++i) {
    cache.gated_flat.data[i] = cache.att.data[i] * cache.stacked.data[i];
  }
  cache.x_v = branch.match_fc.forward(cache.gated_flat, &cache.fc);
}

void MegModel::match_backward(Branch& branch, const MatchCache& cache, const Tensor& dx) {
  Tensor dflat = branch.match_fc.backward(cache.fc, dx);
  const std::size_t n = dflat.numel();
  Tensor datt({2, cache.stacked.shape[1]});
  for (std::size_t i = 0; i < n; ++i) {
    datt.data[i] = dflat.data[i] * cache.stacked.data[i];
  }
  // through the sigmoid soft attention; the stacked features are leaves, so
  // their gradient path ends here.
  Tensor dconv = datt;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = cache.att.data[i];
    dconv.data[i] *= a * (1.0 - a);
  }
  branch.match_conv.backward(cache.conv, dconv);
}

double MegModel::forward(const EvidenceSet& evidence, ForwardCache& cache) const {
  if (!evidence.query) throw std::invalid_argument("forward: evidence set has no query");
  if (evidence.retrieved.empty()) throw std::invalid_argument("forward: evidence set has k = 0");

  cache = ForwardCache{};
  const std::size_t H = config_.hidden;
  cache.branches.resize(branches_.size());

  // Evidence matching: one node per (modality, retrieved package) pair where
  // both sides carry the modality.
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    const Branch& branch = branches_[bi];
    BranchCache& bc = cache.branches[bi];
    auto qit = evidence.query->modalities.find(branch.modality);
    if (qit == evidence.query->modalities.end()) continue;
    for (const Package* r : evidence.retrieved) {
      auto rit = r->modalities.find(branch.modality);
      if (rit == r->modalities.end()) continue;
      NodeCache nc;
      nc.branch = bi;
      match_forward(branch, qit->second, rit->second, nc.match);
      nc.h0 = Tensor({H});
      for (std::size_t i = 0; i < config_.node_dim; ++i) nc.h0.data[i] = nc.match.x_v.data[i];
      bc.node_ids.push_back(cache.nodes.size());
      cache.nodes.push_back(std::move(nc));
    }
  }

  const std::size_t n_nodes = cache.nodes.size();

  if (config_.variant == SummaryVariant::gnn) {
    std::vector<Tensor> h(n_nodes);
    for (std::size_t v = 0; v < n_nodes; ++v) h[v] = cache.nodes[v].h0;

    for (std::size_t t = 0; t < config_.timesteps; ++t) {
      GnnStepCache step;
      step.h_prev = h;
      step.a.resize(n_nodes);
      step.gru.resize(n_nodes);
      step.denom.resize(n_nodes);

      // Neighbor sums from the previous timestep (simultaneous update).
      std::vector<Tensor> branch_sum(branches_.size(), Tensor({H}));
      Tensor total_sum({H});
      for (std::size_t v = 0; v < n_nodes; ++v) {
        add_inplace(branch_sum[cache.nodes[v].branch], step.h_prev[v]);
      }
      if (config_.cross_modal) {
        for (const Tensor& s : branch_sum) add_inplace(total_sum, s);
      }

      std::vector<Tensor> h_next(n_nodes);
      for (std::size_t v = 0; v < n_nodes; ++v) {
        const std::size_t bi = cache.nodes[v].branch;
        const Branch& branch = branches_[bi];
        const std::size_t scope =
            config_.cross_modal ? n_nodes : cache.branches[bi].node_ids.size();
        const double denom = static_cast<double>(scope) - 1.0 + config_.epsilon;
        const Tensor& scope_sum = config_.cross_modal ? total_sum : branch_sum[bi];
        Tensor a({H});
        for (std::size_t i = 0; i < H; ++i) {
          a.data[i] =
              (scope_sum.data[i] - step.h_prev[v].data[i] + branch.agg_bias->data[i]) / denom;
        }
        step.denom[v] = denom;
        h_next[v] = branch.gru.forward(step.h_prev[v], a, &step.gru[v]);
        step.a[v] = std::move(a);
      }
      h = std::move(h_next);
      cache.steps.push_back(std::move(step));
    }
    cache.h_final = std::move(h);

    // Attention readout per branch over post-propagation states.
    for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
      const Branch& branch = branches_[bi];
      BranchCache& bc = cache.branches[bi];
      bc.summary = Tensor({H});
      bc.att.resize(bc.node_ids.size());
      for (std::size_t j = 0; j < bc.node_ids.size(); ++j) {
        const Tensor& hv = cache.h_final[bc.node_ids[j]];
        Tensor gate = branch.att.forward(hv, &bc.att[j]);
        for (std::size_t i = 0; i < H; ++i) bc.summary.data[i] += hv.data[i] * gate.data[i];
      }
    }
  } else if (config_.variant == SummaryVariant::gru_seq) {
    for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
      const Branch& branch = branches_[bi];
      BranchCache& bc = cache.branches[bi];
      Tensor hstate({H});
      bc.seq_gru.resize(bc.node_ids.size());
      for (std::size_t j = 0; j < bc.node_ids.size(); ++j) {
        hstate = branch.gru.forward(hstate, cache.nodes[bc.node_ids[j]].h0, &bc.seq_gru[j]);
      }
      bc.summary = std::move(hstate);
    }
  } else {  // lstm_seq
    for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
      const Branch& branch = branches_[bi];
      BranchCache& bc = cache.branches[bi];
      Tensor hstate({H}), cstate({H});
      bc.seq_lstm.resize(bc.node_ids.size());
      for (std::size_t j = 0; j < bc.node_ids.size(); ++j) {
        auto [hn, cn] =
            branch.lstm.forward(cache.nodes[bc.node_ids[j]].h0, hstate, cstate, &bc.seq_lstm[j]);
        hstate = std::move(hn);
        cstate = std::move(cn);
      }
      bc.summary = std::move(hstate);
    }
  }

  cache.concat = Tensor({branches_.size() * H});
  for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
    for (std::size_t i = 0; i < H; ++i) {
      cache.concat.data[bi * H + i] = cache.branches[bi].summary.data[i];
    }
  }
  Tensor hidden = det_hidden_.forward(cache.concat, &cache.det_hidden);
  Tensor out = det_out_.forward(hidden, &cache.det_out);
  cache.prob = out.data[0];
  cache.valid = true;
  return cache.prob;
}

void MegModel::backward(const ForwardCache& cache, double dprob) {
  if (!cache.valid) throw std::logic_error("MegModel::backward called without a forward pass");
  const std::size_t H = config_.hidden;
  const std::size_t n_nodes = cache.nodes.size();

  Tensor dout({1});
  dout.data[0] = dprob;
  Tensor dhidden = det_out_.backward(cache.det_out, dout);
  Tensor dconcat = det_hidden_.backward(cache.det_hidden, dhidden);

  std::vector<Tensor> dh(n_nodes, Tensor({H}));  // running dL/dh at the current depth
  std::vector<Tensor> dh0(n_nodes, Tensor({H}));

  if (config_.variant == SummaryVariant::gnn) {
    // Readout.
    for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
      Branch& branch = branches_[bi];
      const BranchCache& bc = cache.branches[bi];
      for (std::size_t j = 0; j < bc.node_ids.size(); ++j) {
        const std::size_t v = bc.node_ids[j];
        const Tensor& hv = cache.h_final[v];
        const Tensor& gate = bc.att[j].y;
        Tensor dgate({H});
        for (std::size_t i = 0; i < H; ++i) {
          dh[v].data[i] += dconcat.data[bi * H + i] * gate.data[i];
          dgate.data[i] = dconcat.data[bi * H + i] * hv.data[i];
        }
        Tensor dhv_att = branch.att.backward(bc.att[j], dgate);
        add_inplace(dh[v], dhv_att);
      }
    }

    // Propagation, last timestep first.
    for (std::size_t t = cache.steps.size(); t-- > 0;) {
      const GnnStepCache& step = cache.steps[t];
      std::vector<Tensor> dh_prev(n_nodes, Tensor({H}));
      std::vector<Tensor> w(n_nodes);  // da_v / denom_v
      std::vector<Tensor> branch_wsum(branches_.size(), Tensor({H}));
      Tensor total_wsum({H});

      for (std::size_t v = 0; v < n_nodes; ++v) {
        const std::size_t bi = cache.nodes[v].branch;
        Branch& branch = branches_[bi];
        auto [da, dhp] = branch.gru.backward(step.gru[v], dh[v]);
        add_inplace(dh_prev[v], dhp);
        w[v] = std::move(da);
        for (std::size_t i = 0; i < H; ++i) w[v].data[i] /= step.denom[v];
        add_inplace(*branch.agg_bias_grad, w[v]);
        add_inplace(branch_wsum[bi], w[v]);
      }
      if (config_.cross_modal) {
        for (const Tensor& s : branch_wsum) add_inplace(total_wsum, s);
      }
      for (std::size_t u = 0; u < n_nodes; ++u) {
        const Tensor& scope_wsum =
            config_.cross_modal ? total_wsum : branch_wsum[cache.nodes[u].branch];
        for (std::size_t i = 0; i < H; ++i) {
          dh_prev[u].data[i] += scope_wsum.data[i] - w[u].data[i];
        }
      }
      dh = std::move(dh_prev);
    }
    dh0 = std::move(dh);
  } else if (config_.variant == SummaryVariant::gru_seq) {
    for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
      Branch& branch = branches_[bi];
      const BranchCache& bc = cache.branches[bi];
      if (bc.node_ids.empty()) continue;
      Tensor dstate({H});
      for (std::size_t i = 0; i < H; ++i) dstate.data[i] = dconcat.data[bi * H + i];
      for (std::size_t j = bc.node_ids.size(); j-- > 0;) {
        auto [da, dhp] = branch.gru.backward(bc.seq_gru[j], dstate);
        dh0[bc.node_ids[j]] = std::move(da);
        dstate = std::move(dhp);
      }
    }
  } else {  // lstm_seq
    for (std::size_t bi = 0; bi < branches_.size(); ++bi) {
      Branch& branch = branches_[bi];
      const BranchCache& bc = cache.branches[bi];
      if (bc.node_ids.empty()) continue;
      Tensor dstate({H}), dcell({H});
      for (std::size_t i = 0; i < H; ++i) dstate.data[i] = dconcat.data[bi * H + i];
      for (std::size_t j = bc.node_ids.size(); j-- > 0;) {
        auto [dx, dhp, dcp] = branch.lstm.backward(bc.seq_lstm[j], dstate, dcell);
        dh0[bc.node_ids[j]] = std::move(dx);
        dstate = std::move(dhp);
        dcell = std::move(dcp);
      }
    }
  }

  // Node init is x_v zero-padded, so only the first node_dim coordinates
  // carry gradient into the matching stage.
  for (std::size_t v = 0; v < n_nodes; ++v) {
    const NodeCache& nc = cache.nodes[v];
    Tensor dx({config_.node_dim});
    for (std::size_t i = 0; i < config_.node_dim; ++i) dx.data[i] = dh0[v].data[i];
    match_backward(branches_[nc.branch], nc.match, dx);
  }
}

}  // namespace meg
