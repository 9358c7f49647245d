#include <doctest.h>

#include <random>

#include "k4/board.hpp"
#include "oracles.hpp"

using namespace k4;

TEST_CASE("fresh board has every edge unclaimed") {
  const ColoredBoard b(17);
  CHECK(b.size() == 17);
  CHECK(b.edge_count() == 136);
  CHECK(b.unclaimed_edges().size() == 136);
  CHECK(b.touched() == 0);
  CHECK(b.to_move() == Player::First);
  CHECK(b.fresh_vertex() == 0);
  CHECK_FALSE(b.last_move().has_value());
}

TEST_CASE("claimed returns a new board and leaves the original untouched") {
  const ColoredBoard b(6);
  const ColoredBoard c = b.claimed({Player::First, Edge(4, 1)});
  CHECK(b.is_unclaimed(Edge(1, 4)));
  CHECK(c.at(1, 4) == EdgeState::First);
  CHECK(c.at(4, 1) == EdgeState::First);
  CHECK(c.owns(Player::First, 1, 4));
  CHECK_FALSE(c.owns(Player::Second, 1, 4));
  CHECK(c.to_move() == Player::Second);
  CHECK(c.last_move()->edge == Edge(1, 4));
  CHECK(c.fresh_vertex() == 0);
  CHECK(c.fresh_vertex_excluding(bit(0)) == 2);
}

TEST_CASE("board errors carry their codes") {
  CHECK_THROWS_AS(ColoredBoard(0), BoardError);
  CHECK_THROWS_AS(ColoredBoard(65), BoardError);
  ColoredBoard b(5);
  b.claim({Player::First, Edge(0, 1)});
  try {
    b.claim({Player::Second, Edge(1, 0)});
    FAIL("reclaim accepted");
  } catch (const BoardError& e) {
    CHECK(e.code() == BoardErrorCode::AlreadyClaimed);
  }
  try {
    b.claim({Player::Second, Edge(2, 9)});
    FAIL("out-of-range vertex accepted");
  } catch (const BoardError& e) {
    CHECK(e.code() == BoardErrorCode::OutOfRange);
  }
  try {
    b.claim({Player::Second, Edge(3, 3)});
    FAIL("self-loop accepted");
  } catch (const BoardError& e) {
    CHECK(e.code() == BoardErrorCode::SelfLoop);
  }
}

TEST_CASE("no fresh vertex once every vertex is touched") {
  ColoredBoard b(4);
  b.claim({Player::First, Edge(0, 1)});
  b.claim({Player::Second, Edge(2, 3)});
  CHECK_THROWS_AS(b.fresh_vertex(), BoardError);
}

TEST_CASE("edge lists agree with the adjacency masks") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    const int n = 5 + static_cast<int>(rng() % 20);
    const int moves = static_cast<int>(rng() % (n * (n - 1) / 2 + 1));
    const ColoredBoard b = oracle::random_board(rng, n, moves);
    const auto fp = b.edges_of(Player::First);
    const auto sp = b.edges_of(Player::Second);
    CHECK(static_cast<int>(fp.size()) == b.claimed_by(Player::First));
    CHECK(static_cast<int>(sp.size()) == b.claimed_by(Player::Second));
    CHECK(fp.size() + sp.size() + b.unclaimed_edges().size() ==
          static_cast<std::size_t>(b.edge_count()));
    int degree_sum = 0;
    for (Vertex v = 0; v < n; ++v) degree_sum += b.degree(v, Player::First);
    CHECK(degree_sum == 2 * static_cast<int>(fp.size()));
  }
}

TEST_CASE("relabeling by a permutation and back is the identity") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 100; ++round) {
    const ColoredBoard b = oracle::random_board(rng, 12, 30);
    std::vector<Vertex> perm(12), inv(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < 12; ++i) inv[perm[i]] = i;
    const ColoredBoard r = b.relabeled(perm);
    CHECK(r.claimed_by(Player::First) == b.claimed_by(Player::First));
    CHECK(r.relabeled(inv) == b);
  }
}
