#include "meg/package.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace meg {

using nlohmann::json;

Split split_from_string(const std::string& s) {
  if (s == "reference") return Split::reference;
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw std::runtime_error("unknown split '" + s + "'");
}

std::string to_string(Split s) {
  switch (s) {
    case Split::reference: return "reference";
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Label label_from_string(const std::string& s) {
  if (s == "clean") return Label::clean;
  if (s == "tampered") return Label::tampered;
  throw std::runtime_error("unknown label '" + s + "'");
}

std::string to_string(Label l) { return l == Label::clean ? "clean" : "tampered"; }

std::vector<std::string> DatasetSchema::modality_names() const {
  std::vector<std::string> out;
  out.reserve(modality_dims.size());
  for (const auto& [name, dim] : modality_dims) out.push_back(name);
  return out;
}

namespace {

[[noreturn]] void ingest_error(std::size_t line_no, const std::string& msg) {
  throw std::runtime_error("ingest: line " + std::to_string(line_no) + ": " + msg);
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

Dataset Dataset::load(const std::filesystem::path& manifest_path) {
  std::ifstream is(manifest_path);
  if (!is) throw std::runtime_error("ingest: cannot open " + manifest_path.string());

  Dataset ds;
  std::string line;
  std::size_t line_no = 0;

  // Header line declares modality dimensions.
  if (!std::getline(is, line)) throw std::runtime_error("ingest: empty manifest, missing schema line");
  ++line_no;
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    ingest_error(line_no, std::string("unparseable schema line: ") + e.what());
  }
  if (!header.contains("schema") || !header["schema"].is_object()) {
    ingest_error(line_no, "first line must be {\"schema\": {modality: dim, ...}}");
  }
  for (const auto& [name, dim] : header["schema"].items()) {
    if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) {
      ingest_error(line_no, "modality '" + name + "' must declare a positive dimension");
    }
    ds.schema_.modality_dims[name] = dim.get<std::size_t>();
  }
  if (ds.schema_.modality_dims.empty()) ingest_error(line_no, "schema declares no modalities");

  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      ingest_error(line_no, std::string("unparseable record: ") + e.what());
    }
    Package pkg;
    try {
      pkg.id = obj.at("id").get<std::string>();
      pkg.split = split_from_string(obj.at("split").get<std::string>());
      pkg.label = label_from_string(obj.at("label").get<std::string>());
      pkg.entity_id = obj.value("entity_id", std::string{});
      for (const auto& [name, vec] : obj.at("modalities").items()) {
        auto dim_it = ds.schema_.modality_dims.find(name);
        if (dim_it == ds.schema_.modality_dims.end()) {
          ingest_error(line_no, "modality '" + name + "' not declared in schema");
        }
        std::vector<double> values = vec.get<std::vector<double>>();
        if (values.size() != dim_it->second) {
          ingest_error(line_no, "modality '" + name + "' has length " +
                                    std::to_string(values.size()) + ", schema declares " +
                                    std::to_string(dim_it->second));
        }
        if (l2_norm(values) == 0.0) {
          ingest_error(line_no, "modality '" + name + "' is a zero vector (cosine undefined)");
        }
        pkg.modalities.emplace(name, std::move(values));
      }
    } catch (const json::exception& e) {
      ingest_error(line_no, std::string("bad record: ") + e.what());
    }
    if (pkg.modalities.empty()) ingest_error(line_no, "package '" + pkg.id + "' has no modalities");
    if (ds.by_id_.count(pkg.id)) ingest_error(line_no, "duplicate id '" + pkg.id + "'");
    ds.by_id_.emplace(pkg.id, ds.packages_.size());
    ds.packages_.push_back(std::move(pkg));
  }
  return ds;
}

std::vector<const Package*> Dataset::split(Split s) const {
  std::vector<const Package*> out;
  for (const Package& p : packages_) {
    if (p.split == s) out.push_back(&p);
  }
  return out;
}

const Package* Dataset::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &packages_[it->second];
}

std::vector<std::string> Dataset::reference_ids_for_entity(const std::string& entity_id) const {
  std::vector<std::string> out;
  for (const Package& p : packages_) {
    if (p.split == Split::reference && p.entity_id == entity_id) out.push_back(p.id);
  }
  return out;
}

}  // namespace meg
