#include "k4/canon.hpp"

#include <algorithm>
#include <numeric>

namespace k4 {
namespace {

// Ordered partition: `order` lists vertices, `starts` marks cell starts
// (ascending, first is 0). Cell order is an isomorphism invariant.
struct Partition {
  std::vector<int> order;
  std::vector<int> starts;

  int cell_end(std::size_t c) const {
    return c + 1 < starts.size() ? starts[c + 1] : static_cast<int>(order.size());
  }
  bool discrete() const { return starts.size() == order.size(); }
};

class Canonicalizer {
 public:
  explicit Canonicalizer(const ColoredGraph& g) : g_(g), k_(g.k) {}

  CanonicalForm run() {
    Partition p;
    p.order.resize(k_);
    std::iota(p.order.begin(), p.order.end(), 0);
    // Initial cells: vertex colour, then degrees in each colour.
    auto key = [&](int v) {
      return std::tuple(g_.vertex_color[v], popcount(g_.first[v]), popcount(g_.second[v]));
    };
    std::stable_sort(p.order.begin(), p.order.end(),
                     [&](int a, int b) { return key(a) < key(b); });
    for (int i = 0; i < k_; ++i) {
      if (i == 0 || key(p.order[i]) != key(p.order[i - 1])) p.starts.push_back(i);
    }
    search(std::move(p));

    CanonicalForm out;
    out.order = best_order_;
    auto& bytes = out.code.bytes;
    bytes.reserve(1 + k_ + best_adj_.size());
    bytes.push_back(static_cast<std::uint8_t>(k_));
    // Colours as LEB128; most vertices carry colour 0, so keys stay short.
    for (int v : best_order_) {
      std::uint32_t c = g_.vertex_color[v];
      do {
        const auto low = static_cast<std::uint8_t>(c & 0x7F);
        c >>= 7;
        bytes.push_back(c != 0 ? static_cast<std::uint8_t>(low | 0x80) : low);
      } while (c != 0);
    }
    bytes.insert(bytes.end(), best_adj_.begin(), best_adj_.end());
    return out;
  }

 private:
  void refine(Partition& p) const {
    std::vector<std::uint8_t> sig;
    std::vector<VertexMask> masks;
    std::vector<int> scratch;
    bool changed = true;
    while (changed && !p.discrete()) {
      changed = false;
      const std::size_t cells = p.starts.size();
      masks.assign(cells, 0);
      for (std::size_t c = 0; c < cells; ++c) {
        for (int i = p.starts[c]; i < p.cell_end(c); ++i) masks[c] |= bit(p.order[i]);
      }
      const std::size_t width = 2 * cells;
      sig.assign(static_cast<std::size_t>(k_) * width, 0);
      for (int v = 0; v < k_; ++v) {
        std::uint8_t* row = &sig[static_cast<std::size_t>(v) * width];
        for (std::size_t c = 0; c < cells; ++c) {
          row[2 * c] = static_cast<std::uint8_t>(popcount(g_.first[v] & masks[c]));
          row[2 * c + 1] = static_cast<std::uint8_t>(popcount(g_.second[v] & masks[c]));
        }
      }
      auto less = [&](int a, int b) {
        return std::lexicographical_compare(
            &sig[a * width], &sig[a * width] + width, &sig[b * width], &sig[b * width] + width);
      };
      auto same = [&](int a, int b) {
        return std::equal(&sig[a * width], &sig[a * width] + width, &sig[b * width]);
      };
      std::vector<int> new_starts;
      new_starts.reserve(k_);
      for (std::size_t c = 0; c < cells; ++c) {
        const int lo = p.starts[c];
        const int hi = p.cell_end(c);
        new_starts.push_back(lo);
        if (hi - lo == 1) continue;
        std::stable_sort(p.order.begin() + lo, p.order.begin() + hi, less);
        for (int i = lo + 1; i < hi; ++i) {
          if (!same(p.order[i], p.order[i - 1])) {
            new_starts.push_back(i);
            changed = true;
          }
        }
      }
      p.starts = std::move(new_starts);
    }
  }

  bool twins(int a, int b) const {
    return (g_.first[a] & ~bit(b)) == (g_.first[b] & ~bit(a)) &&
           (g_.second[a] & ~bit(b)) == (g_.second[b] & ~bit(a));
  }

  void leaf(const Partition& p) {
    std::vector<std::uint8_t> adj((k_ * (k_ - 1) / 2 * 2 + 7) / 8, 0);
    std::size_t bitpos = 0;
    for (int i = 0; i < k_; ++i) {
      const int a = p.order[i];
      for (int j = i + 1; j < k_; ++j) {
        const int b = p.order[j];
        const unsigned c = (g_.first[a] >> b & 1U) ? 1U : (g_.second[a] >> b & 1U) ? 2U : 0U;
        // Big-endian packing keeps byte order equal to pair order.
        adj[bitpos / 8] |= static_cast<std::uint8_t>(c << (6 - bitpos % 8));
        bitpos += 2;
      }
    }
    if (!have_best_ || adj < best_adj_) {
      best_adj_ = std::move(adj);
      best_order_ = p.order;
      have_best_ = true;
    }
  }

  void search(Partition p) {
    refine(p);
    if (p.discrete()) {
      leaf(p);
      return;
    }
    std::size_t target = 0;
    while (p.cell_end(target) - p.starts[target] == 1) ++target;
    const int lo = p.starts[target];
    const int hi = p.cell_end(target);
    std::vector<int> tried;
    for (int i = lo; i < hi; ++i) {
      const int v = p.order[i];
      // Swapping twins is an automorphism that fixes the partition, so the
      // subtree under v mirrors one already explored.
      if (std::any_of(tried.begin(), tried.end(), [&](int t) { return twins(t, v); })) {
        continue;
      }
      tried.push_back(v);
      Partition child = p;
      std::swap(child.order[lo], child.order[i]);
      // Keep the rest of the cell in its previous relative order.
      std::sort(child.order.begin() + lo + 1, child.order.begin() + hi);
      child.starts.insert(child.starts.begin() + static_cast<long>(target) + 1, lo + 1);
      search(std::move(child));
    }
  }

  const ColoredGraph& g_;
  int k_;
  bool have_best_ = false;
  std::vector<std::uint8_t> best_adj_;
  std::vector<int> best_order_;
};

}  // namespace

std::string CanonicalCode::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

CanonicalForm canonical_form(const ColoredGraph& g) {
  if (g.k == 0) {
    CanonicalForm out;
    out.code.bytes.push_back(0);
    return out;
  }
  return Canonicalizer(g).run();
}

ColoredGraph claimed_subgraph(const ColoredBoard& board, VertexMask keep,
                              const std::vector<std::uint32_t>* colors,
                              std::vector<Vertex>* local_to_board) {
  const VertexMask vs = (board.touched() | keep) & board.all_vertices();
  std::vector<Vertex> ids;
  std::array<int, kMaxVertices> local{};
  for_each_bit(vs, [&](Vertex v) {
    local[v] = static_cast<int>(ids.size());
    ids.push_back(v);
  });
  ColoredGraph g;
  g.k = static_cast<int>(ids.size());
  g.vertex_color.assign(g.k, 0);
  g.first.assign(g.k, 0);
  g.second.assign(g.k, 0);
  for (int i = 0; i < g.k; ++i) {
    const Vertex v = ids[i];
    if (colors != nullptr) g.vertex_color[i] = (*colors)[v];
    for_each_bit(board.neighbours(Player::First, v), [&](Vertex w) { g.first[i] |= bit(local[w]); });
    for_each_bit(board.neighbours(Player::Second, v), [&](Vertex w) { g.second[i] |= bit(local[w]); });
  }
  if (local_to_board != nullptr) *local_to_board = std::move(ids);
  return g;
}

CanonicalCode canonical_code(const ColoredBoard& board) {
  return canonical_form(claimed_subgraph(board, 0, nullptr, nullptr)).code;
}

}  // namespace k4
