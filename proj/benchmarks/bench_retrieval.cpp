#include <benchmark/benchmark.h>

#include "meg/package.hpp"
#include "meg/retrieval.hpp"
#include "meg/rng.hpp"
#include "meg/synthetic.hpp"

namespace {

struct Fixture {
  meg::Dataset dataset;
  std::unique_ptr<meg::ReferenceIndex> index;
  std::vector<const meg::Package*> queries;

  explicit Fixture(std::size_t entities) {
    meg::GenerationConfig cfg;
    cfg.num_entities = entities;
    cfg.packages_per_entity = 10;
    cfg.reference_fraction = 0.5;
    cfg.seed = 11;
    auto dir = std::filesystem::temp_directory_path() / ("meg_bench_" + std::to_string(entities));
    meg::generate(cfg, dir);
    dataset = meg::Dataset::load(dir / "manifest.jsonl");
    index = std::make_unique<meg::ReferenceIndex>(dataset);
    queries = dataset.split(meg::Split::test);
  }
};

void BM_retrieve_top5(benchmark::State& state) {
  static Fixture fx(static_cast<std::size_t>(64));
  std::size_t qi = 0;
  for (auto _ : state) {
    auto result = fx.index->retrieve(*fx.queries[qi % fx.queries.size()], 5);
    benchmark::DoNotOptimize(result);
    ++qi;
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(fx.index->size()));
}

}  // namespace

BENCHMARK(BM_retrieve_top5);
