#include <doctest.h>

#include "semitcl/types.hpp"
#include "test_support.hpp"

using namespace semitcl;

namespace {

Track make_track(std::int64_t id, const std::vector<int>& frames) {
  Track t;
  t.id = id;
  for (int f : frames) {
    Instance inst;
    inst.frame = f;
    inst.box = Box{10.0, 20.0, 30.0, 40.0};
    inst.identity = id;
    t.instances.push_back(inst);
  }
  return t;
}

}  // namespace

TEST_CASE("validate_track accepts a well-formed track") {
  CHECK(!validate_track(make_track(1, {0, 1, 2})));
}

TEST_CASE("validate_track flags duplicate frames") {
  const auto err = validate_track(make_track(1, {0, 0, 1}));
  REQUIRE(err);
  CHECK(*err == "frames not strictly increasing");
}

TEST_CASE("validate_track flags an empty track") {
  Track t;
  t.id = 3;
  const auto err = validate_track(t);
  REQUIRE(err);
  CHECK(*err == "empty track");
}

TEST_CASE("validate_track flags identity mismatches") {
  Track t = make_track(1, {0, 1});
  t.instances[1].identity = 9;
  REQUIRE(validate_track(t));
}

TEST_CASE("every contiguous window of a valid track is a valid sub-track") {
  const Track t = make_track(7, {0, 2, 3, 5, 8, 9});
  REQUIRE(!validate_track(t));
  const int n = static_cast<int>(t.instances.size());
  for (int start = 0; start < n; ++start) {
    for (int len = 1; start + len <= n; ++len) {
      SubTrack sub;
      sub.parent_id = t.id;
      sub.instances.assign(t.instances.begin() + start, t.instances.begin() + start + len);
      CHECK(!validate_subtrack(sub, t));
    }
  }
}

TEST_CASE("non-contiguous picks fail sub-track validation") {
  const Track t = make_track(7, {0, 1, 2, 3});
  SubTrack sub;
  sub.parent_id = 7;
  sub.instances = {t.instances[0], t.instances[2]};
  CHECK(validate_subtrack(sub, t));
}

TEST_CASE("iou basics") {
  const Box a{0, 0, 2, 2};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, Box{10, 10, 2, 2}) == doctest::Approx(0.0));
  CHECK(iou(a, Box{1, 0, 2, 2}) == doctest::Approx(2.0 / 6.0));
}
