#include <doctest.h>

#include "gts/kleene.hpp"

using namespace gts;

namespace {
const TruthValue kAll[] = {TruthValue::False, TruthValue::Maybe, TruthValue::True};
}

TEST_CASE("kleene connective tables") {
  CHECK(conj(TruthValue::Maybe, TruthValue::True) == TruthValue::Maybe);
  CHECK(conj(TruthValue::False, TruthValue::Maybe) == TruthValue::False);
  CHECK(conj(TruthValue::True, TruthValue::True) == TruthValue::True);

  CHECK(disj(TruthValue::Maybe, TruthValue::False) == TruthValue::Maybe);
  CHECK(neg(TruthValue::Maybe) == TruthValue::Maybe);
  CHECK(neg(TruthValue::False) == TruthValue::True);
}

TEST_CASE("information and logical orders") {
  CHECK(info_le(TruthValue::False, TruthValue::Maybe));
  CHECK_FALSE(info_le(TruthValue::True, TruthValue::False));
  CHECK(info_le(TruthValue::Maybe, TruthValue::Maybe));

  CHECK(logical_le(TruthValue::False, TruthValue::Maybe));
  CHECK(logical_le(TruthValue::Maybe, TruthValue::True));
  CHECK_FALSE(logical_le(TruthValue::True, TruthValue::Maybe));
}

TEST_CASE("info_join examples") {
  CHECK(info_join(TruthValue::False, TruthValue::False) == TruthValue::False);
  CHECK(info_join(TruthValue::False, TruthValue::True) == TruthValue::Maybe);
  CHECK(info_join(TruthValue::True, TruthValue::Maybe) == TruthValue::Maybe);
}

TEST_CASE("both relations are partial orders") {
  for (TruthValue a : kAll) {
    CHECK(info_le(a, a));
    CHECK(logical_le(a, a));
    for (TruthValue b : kAll) {
      if (info_le(a, b) && info_le(b, a)) CHECK(a == b);
      if (logical_le(a, b) && logical_le(b, a)) CHECK(a == b);
      for (TruthValue c : kAll) {
        if (info_le(a, b) && info_le(b, c)) CHECK(info_le(a, c));
        if (logical_le(a, b) && logical_le(b, c)) CHECK(logical_le(a, c));
      }
    }
  }
}

TEST_CASE("lattice laws and De Morgan, exhaustively") {
  for (TruthValue a : kAll) {
    CHECK(conj(a, a) == a);
    CHECK(disj(a, a) == a);
    for (TruthValue b : kAll) {
      CHECK(conj(a, b) == conj(b, a));
      CHECK(disj(a, b) == disj(b, a));
      CHECK(neg(conj(a, b)) == disj(neg(a), neg(b)));
      CHECK(neg(disj(a, b)) == conj(neg(a), neg(b)));
      for (TruthValue c : kAll) {
        CHECK(conj(conj(a, b), c) == conj(a, conj(b, c)));
        CHECK(disj(disj(a, b), c) == disj(a, disj(b, c)));
      }
    }
  }
}

TEST_CASE("connectives are information-monotone") {
  for (TruthValue a : kAll)
    for (TruthValue a2 : kAll) {
      if (!info_le(a, a2)) continue;
      CHECK(info_le(neg(a), neg(a2)));
      for (TruthValue b : kAll)
        for (TruthValue b2 : kAll) {
          if (!info_le(b, b2)) continue;
          CHECK(info_le(conj(a, b), conj(a2, b2)));
          CHECK(info_le(disj(a, b), disj(a2, b2)));
          CHECK(info_le(implies(a, b), implies(a2, b2)));
        }
    }
}

TEST_CASE("info_join is the least upper bound") {
  for (TruthValue a : kAll)
    for (TruthValue b : kAll) {
      const TruthValue j = info_join(a, b);
      CHECK(info_le(a, j));
      CHECK(info_le(b, j));
      for (TruthValue u : kAll)
        if (info_le(a, u) && info_le(b, u)) CHECK(info_le(j, u));
    }
}

TEST_CASE("textual round-trip") {
  for (TruthValue a : kAll) {
    const auto back = truth_value_from_text(to_text(a));
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK(to_text(TruthValue::Maybe) == "1/2");
  CHECK_FALSE(truth_value_from_text("2").has_value());
}
