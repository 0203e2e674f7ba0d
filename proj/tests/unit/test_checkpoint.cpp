#include <doctest.h>

#include <fstream>

#include "meg/checkpoint.hpp"
#include "meg/rng.hpp"
#include "test_util.hpp"

using namespace meg;

namespace {

ParamRegistry make_registry(std::uint64_t seed) {
  Rng rng(seed);
  ParamRegistry reg;
  for (double& v : reg.create("layer.weights", {3, 4}).data) v = rng.uniform(-1, 1);
  for (double& v : reg.create("layer.bias", {3}).data) v = rng.uniform(-1, 1);
  for (double& v : reg.create("gru.W", {2, 2}).data) v = rng.gaussian();
  return reg;
}

}  // namespace

TEST_CASE("checkpoint round-trips every value exactly") {
  auto dir = testutil::scratch_dir("checkpoint_roundtrip");
  ParamRegistry reg = make_registry(5);
  save_checkpoint(reg, dir / "ckpt.bin");

  ParamRegistry other = make_registry(99);  // same names, different values
  load_checkpoint(other, dir / "ckpt.bin");
  for (const auto& name : reg.names()) {
    CHECK(other.param(name).data == reg.param(name).data);
  }
}

TEST_CASE("checkpoint writes are byte-identical for identical parameters") {
  auto dir = testutil::scratch_dir("checkpoint_bytes");
  ParamRegistry reg = make_registry(5);
  save_checkpoint(reg, dir / "a.bin");
  save_checkpoint(reg, dir / "b.bin");

  std::ifstream a(dir / "a.bin", std::ios::binary), b(dir / "b.bin", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(!sa.empty());
}

TEST_CASE("checkpoint load validates structure") {
  auto dir = testutil::scratch_dir("checkpoint_errors");
  ParamRegistry reg = make_registry(5);
  save_checkpoint(reg, dir / "ckpt.bin");

  SUBCASE("shape mismatch") {
    ParamRegistry wrong;
    wrong.create("layer.weights", {4, 3});
    wrong.create("layer.bias", {3});
    wrong.create("gru.W", {2, 2});
    CHECK_THROWS_AS(load_checkpoint(wrong, dir / "ckpt.bin"), std::runtime_error);
  }
  SUBCASE("entry count mismatch") {
    ParamRegistry wrong;
    wrong.create("layer.weights", {3, 4});
    CHECK_THROWS_AS(load_checkpoint(wrong, dir / "ckpt.bin"), std::runtime_error);
  }
  SUBCASE("bad magic") {
    std::ofstream os(dir / "junk.bin", std::ios::binary);
    os << "NOTACKPT and then some";
    os.close();
    ParamRegistry r2 = make_registry(5);
    CHECK_THROWS_AS(load_checkpoint(r2, dir / "junk.bin"), std::runtime_error);
  }
  SUBCASE("missing file") {
    ParamRegistry r2 = make_registry(5);
    CHECK_THROWS_AS(load_checkpoint(r2, dir / "absent.bin"), std::runtime_error);
  }
}
