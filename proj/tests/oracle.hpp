#pragma once

// Independent reference constructions used by the unit and acceptance
// suites. Nothing here calls into the library's hypergraph code: horizons,
// offsets and hyperedge start positions are re-derived from first principles.
//
// A start position d (1-based) of a family with size H and hop k is valid iff
// (d - 1) mod (H k) < k: runs are laid out in groups of k interleaved runs
// that together tile H k consecutive positions. The run d, d+k, ..,
// d+(H-1)k is kept only when it fits in the scale.

#include <cstddef>
#include <set>
#include <vector>

namespace mshyper::oracle {

using Edge = std::vector<std::size_t>;  // node ids, coarse nodes first
using EdgeSet = std::set<Edge>;

struct Plan {
  std::vector<std::size_t> horizons;
  std::vector<std::size_t> windows;
  std::vector<std::size_t> offsets;  // ids preceding each scale
  bool valid = true;
};

inline Plan make_plan(std::size_t t, const std::vector<std::size_t>& windows) {
  Plan p;
  p.windows = windows;
  std::size_t h = t;
  p.horizons.push_back(h);
  for (std::size_t l : windows) {
    std::size_t next = 0;
    while ((next + 1) * l <= h) ++next;
    if (next == 0) p.valid = false;
    p.horizons.push_back(next);
    h = next;
  }
  std::size_t off = 0;
  for (std::size_t x : p.horizons) {
    p.offsets.push_back(off);
    off += x;
  }
  return p;
}

// Smallest c with c * b >= a.
inline std::size_t ceil_by_search(std::size_t a, std::size_t b) {
  std::size_t c = 0;
  while (c * b < a) ++c;
  return c;
}

// Valid start positions for one scale, in increasing order.
inline std::vector<std::size_t> starts(std::size_t h, std::size_t size, std::size_t hop) {
  std::vector<std::size_t> out;
  for (std::size_t d = 1; d <= h; ++d) {
    if ((d - 1) % (size * hop) < hop && d + (size - 1) * hop <= h) out.push_back(d);
  }
  return out;
}

inline EdgeSet intra(const Plan& p, const std::vector<std::size_t>& sizes, std::size_t hop) {
  EdgeSet out;
  for (std::size_t s = 0; s < p.horizons.size(); ++s) {
    for (std::size_t d : starts(p.horizons[s], sizes[s], hop)) {
      Edge e;
      for (std::size_t j = 0; j < sizes[s]; ++j) e.push_back(p.offsets[s] + d + j * hop);
      out.insert(e);
    }
  }
  return out;
}

inline EdgeSet inter(const Plan& p, const std::vector<std::size_t>& sizes, std::size_t hop) {
  EdgeSet out;
  for (std::size_t s = 0; s + 1 < p.horizons.size(); ++s) {
    for (std::size_t d : starts(p.horizons[s], sizes[s], hop)) {
      const std::size_t coarse = ceil_by_search(d, p.windows[s]);
      if (coarse > p.horizons[s + 1]) continue;
      Edge e{p.offsets[s + 1] + coarse};
      for (std::size_t j = 0; j < sizes[s]; ++j) e.push_back(p.offsets[s] + d + j * hop);
      out.insert(e);
    }
  }
  return out;
}

inline EdgeSet mixed(const Plan& p, std::size_t run_len, std::size_t hop) {
  EdgeSet out;
  const std::size_t scales = p.horizons.size();
  if (scales < 2) return out;
  for (std::size_t d : starts(p.horizons[0], run_len, hop)) {
    Edge e;
    bool ok = true;
    for (std::size_t s = scales; s >= 2; --s) {
      std::size_t product = 1;
      for (std::size_t a = 0; a + 1 < s; ++a) product *= p.windows[a];
      const std::size_t pos = ceil_by_search(d, product);
      ok = ok && pos <= p.horizons[s - 1];
      e.push_back(p.offsets[s - 1] + pos);
    }
    if (!ok) continue;
    for (std::size_t j = 0; j < run_len; ++j) e.push_back(d + j * hop);
    out.insert(e);
  }
  return out;
}

// Contiguous-block construction for hop 1: the i-th edge covers
// (i - 1) H + 1 .. i H.
inline EdgeSet intra_blocks(const Plan& p, const std::vector<std::size_t>& sizes) {
  EdgeSet out;
  for (std::size_t s = 0; s < p.horizons.size(); ++s) {
    for (std::size_t i = 1; i * sizes[s] <= p.horizons[s]; ++i) {
      Edge e;
      for (std::size_t j = (i - 1) * sizes[s] + 1; j <= i * sizes[s]; ++j) e.push_back(p.offsets[s] + j);
      out.insert(e);
    }
  }
  return out;
}

// Contiguous-block inter edges: block i of scale s plus the coarse node
// that covers its first position.
inline EdgeSet inter_blocks(const Plan& p, const std::vector<std::size_t>& sizes) {
  EdgeSet out;
  for (std::size_t s = 0; s + 1 < p.horizons.size(); ++s) {
    for (std::size_t i = 1; i * sizes[s] <= p.horizons[s]; ++i) {
      const std::size_t first = (i - 1) * sizes[s] + 1;
      const std::size_t coarse = ceil_by_search(first, p.windows[s]);
      if (coarse > p.horizons[s + 1]) continue;
      Edge e{p.offsets[s + 1] + coarse};
      for (std::size_t j = first; j <= i * sizes[s]; ++j) e.push_back(p.offsets[s] + j);
      out.insert(e);
    }
  }
  return out;
}

// Contiguous-block mixed edges over the finest scale.
inline EdgeSet mixed_blocks(const Plan& p, std::size_t run_len) {
  EdgeSet out;
  const std::size_t scales = p.horizons.size();
  if (scales < 2) return out;
  for (std::size_t i = 1; i * run_len <= p.horizons[0]; ++i) {
    const std::size_t first = (i - 1) * run_len + 1;
    Edge e;
    bool ok = true;
    std::size_t product = 1;
    std::vector<std::size_t> coarse(scales, 0);
    for (std::size_t s = 1; s < scales; ++s) {
      product *= p.windows[s - 1];
      coarse[s] = ceil_by_search(first, product);
      ok = ok && coarse[s] <= p.horizons[s];
    }
    if (!ok) continue;
    for (std::size_t s = scales - 1; s >= 1; --s) e.push_back(p.offsets[s] + coarse[s]);
    for (std::size_t j = first; j <= i * run_len; ++j) e.push_back(j);
    out.insert(e);
  }
  return out;
}

}  // namespace mshyper::oracle
