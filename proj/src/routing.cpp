#include "dsp/routing.hpp"

#include "dsp/error.hpp"
#include "dsp/rng.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dsp {

namespace {

constexpr double kImproveEps = 1e-10;

class Distances {
 public:
  Distances(const Points& points, Metric metric) : points_(points), metric_(metric) {}
  double operator()(int a, int b) const {
    return distance(points_.col(a), points_.col(b), metric_);
  }

 private:
  const Points& points_;
  Metric metric_;
};

// Returns the number of moves applied (bounded by budget).
int two_opt(std::vector<int>& o, const Distances& dist, int budget) {
  const int n = static_cast<int>(o.size());
  if (n < 4 || budget <= 0) return 0;
  int moves = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n - 2; ++i) {
      for (int j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        const int a = o[i], b = o[i + 1], c = o[j], d = o[(j + 1) % n];
        const double delta = dist(a, c) + dist(b, d) - dist(a, b) - dist(c, d);
        if (delta < -kImproveEps) {
          std::reverse(o.begin() + i + 1, o.begin() + j + 1);
          improved = true;
          if (++moves >= budget) return moves;
        }
      }
    }
  }
  return moves;
}

// Moves segments of 1..3 consecutive nodes to a better position, possibly reversed.
int or_opt(std::vector<int>& o, const Distances& dist, int budget) {
  const int n = static_cast<int>(o.size());
  if (n < 5 || budget <= 0) return 0;
  int moves = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int len = 1; len <= 3; ++len) {
      for (int i = 1; i + len <= n; ++i) {
        const int p = o[i - 1], s0 = o[i], s1 = o[i + len - 1], q = o[(i + len) % n];
        if (q == p) continue;
        const double gain = dist(p, s0) + dist(s1, q) - dist(p, q);
        if (gain <= kImproveEps) continue;

        int best_j = -1;
        bool best_rev = false;
        for (int j = 0; j < n; ++j) {
          if (j >= i - 1 && j <= i + len - 1) continue;
          const int a = o[j], b = o[(j + 1) % n];
          if (b == s0) continue;
          const double base = dist(a, b);
          const double fwd = dist(a, s0) + dist(s1, b) - base;
          const double rev = dist(a, s1) + dist(s0, b) - base;
          if (fwd < gain - kImproveEps) {
            best_j = j;
            best_rev = false;
            break;
          }
          if (rev < gain - kImproveEps) {
            best_j = j;
            best_rev = true;
            break;
          }
        }
        if (best_j < 0) continue;

        const int anchor = o[best_j];
        std::vector<int> segment(o.begin() + i, o.begin() + i + len);
        if (best_rev) std::reverse(segment.begin(), segment.end());
        o.erase(o.begin() + i, o.begin() + i + len);
        const auto pos = std::find(o.begin(), o.end(), anchor);
        o.insert(pos + 1, segment.begin(), segment.end());
        improved = true;
        if (++moves >= budget) return moves;
      }
    }
  }
  return moves;
}

// k nearest other points of every point, closest first.
std::vector<std::vector<int>> nearest_lists(const Points& points, Metric metric, int k) {
  const int n = static_cast<int>(points.cols());
  k = std::min(k, n - 1);
  std::vector<std::vector<int>> out(n);
  if (k <= 0) return out;
  std::vector<std::pair<double, int>> cand(n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      cand[v] = {v == u ? std::numeric_limits<double>::infinity()
                        : distance(points.col(u), points.col(v), metric),
                 v};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    out[u].reserve(k);
    for (int j = 0; j < k; ++j) out[u].push_back(cand[j].second);
  }
  return out;
}

// Iterated local search over a cyclic tour: 2-opt and Or-opt restricted to neighbour
// lists with a queue of active nodes, perturbed by double-bridge kicks whose cut points
// lie within a short window. A kick is kept only if the tour gets shorter.
class TourSearch {
 public:
  TourSearch(std::vector<int>& order, const Points& points, Metric metric)
      : order_(order), dist_(points, metric), n_(static_cast<int>(order.size())) {
    pos_.assign(n_, 0);
    for (int k = 0; k < n_; ++k) pos_[order_[k]] = k;
    neighbors_ = nearest_lists(points, metric, 10);
  }

  void run(int kicks, std::uint64_t seed) {
    if (n_ < 8) return;
    std::vector<int> all(n_);
    std::iota(all.begin(), all.end(), 0);
    local_search(all);
    double best = length();
    Rng rng(seed);
    const int window = std::min(n_ - 1, 50);
    std::uniform_int_distribution<int> start(0, n_ - 1);
    std::uniform_int_distribution<int> cut(1, window - 1);
    std::vector<int> saved;
    for (int k = 0; k < kicks; ++k) {
      int c[3] = {cut(rng), cut(rng), cut(rng)};
      std::sort(c, c + 3);
      if (c[0] == c[1] || c[1] == c[2]) continue;
      saved = order_;
      const int s = start(rng);
      std::rotate(order_.begin(), order_.begin() + s, order_.end());
      // A B C D -> A C B D with A = [0, c0), B = [c0, c1), C = [c1, c2).
      std::rotate(order_.begin() + c[0], order_.begin() + c[1], order_.begin() + c[2]);
      reindex();
      std::vector<int> touched;
      for (int j : {0, c[0] - 1, c[0], c[1] - 1, c[1], c[2] - 1, c[2] % n_, n_ - 1}) {
        touched.push_back(order_[j]);
      }
      local_search(touched);
      const double len = length();
      if (len < best - kImproveEps) {
        best = len;
      } else {
        order_ = saved;
        reindex();
      }
    }
  }

 private:
  int succ(int a) const { return order_[pos_[a] + 1 == n_ ? 0 : pos_[a] + 1]; }
  int pred(int a) const { return order_[pos_[a] == 0 ? n_ - 1 : pos_[a] - 1]; }

  void reindex() {
    for (int k = 0; k < n_; ++k) pos_[order_[k]] = k;
  }

  double length() const {
    double total = 0.0;
    for (int k = 0; k < n_; ++k) total += dist_(order_[k], order_[k + 1 == n_ ? 0 : k + 1]);
    return total;
  }

  // Reverses the path x..y (successor direction), or its complement when shorter.
  void reverse_path(int x, int y) {
    int i = pos_[x];
    int j = pos_[y];
    int len = (j - i + n_) % n_ + 1;
    if (2 * len > n_) {
      i = (j + 1) % n_;
      j = (pos_[x] - 1 + n_) % n_;
      len = n_ - len;
    }
    for (int s = 0; s < len / 2; ++s) {
      const int a = (i + s) % n_;
      const int b = (j - s + n_) % n_;
      std::swap(order_[a], order_[b]);
      pos_[order_[a]] = a;
      pos_[order_[b]] = b;
    }
  }

  // Replaces edges (a, b) and (c, d) by (a, c) and (b, d); b and d follow a and c in
  // the same direction.
  void exchange(int a, int b, int c, int d) {
    if (succ(a) == b) {
      reverse_path(b, c);
    } else {
      reverse_path(a, d);
    }
  }

  bool improve_two_opt(int a) {
    for (int dir = 0; dir < 2; ++dir) {
      const int b = dir == 0 ? succ(a) : pred(a);
      const double ab = dist_(a, b);
      for (int c : neighbors_[a]) {
        const double ac = dist_(a, c);
        if (ac >= ab - kImproveEps) break;
        const int d = dir == 0 ? succ(c) : pred(c);
        if (c == b || d == a) continue;
        const double delta = ac + dist_(b, d) - ab - dist_(c, d);
        if (delta < -kImproveEps) {
          exchange(a, b, c, d);
          activate({a, b, c, d});
          return true;
        }
      }
    }
    return false;
  }

  // Moves a segment of 1..3 nodes starting at a next to one of its endpoints' neighbours.
  bool improve_or_opt(int a) {
    for (int len = 1; len <= 3 && len + 3 <= n_; ++len) {
      for (int dir = 0; dir < 2; ++dir) {
        auto step = [&](int v) { return dir == 0 ? succ(v) : pred(v); };
        auto back = [&](int v) { return dir == 0 ? pred(v) : succ(v); };
        int s1 = a;
        for (int k = 1; k < len; ++k) s1 = step(s1);
        const int p = back(a);
        const int q = step(s1);
        const double gain = dist_(p, a) + dist_(s1, q) - dist_(p, q);
        if (gain <= kImproveEps) continue;
        auto inside = [&](int v) {
          for (int w = a, k = 0; k < len; ++k, w = step(w)) {
            if (w == v) return true;
          }
          return false;
        };
        for (int end : {a, s1}) {
          for (int c : neighbors_[end]) {
            if (dist_(end, c) >= gain - kImproveEps) break;
            if (inside(c)) continue;
            for (int e : {succ(c), pred(c)}) {
              if (inside(e)) continue;
              const double base = dist_(c, e);
              const double fwd = dist_(c, a) + dist_(s1, e) - base;
              const double rev = dist_(c, s1) + dist_(a, e) - base;
              if (std::min(fwd, rev) < gain - kImproveEps) {
                move_segment(a, s1, step, c, e, fwd <= rev);
                activate({p, q, a, s1, c, e});
                return true;
              }
            }
          }
        }
      }
    }
    return false;
  }

  // Reinserts the segment a..s1 (walked with step) between the adjacent nodes c and e,
  // a next to c when a_at_c holds.
  template <typename Step>
  void move_segment(int a, int s1, Step step, int c, int e, bool a_at_c) {
    std::vector<int> segment;
    for (int w = a;; w = step(w)) {
      segment.push_back(w);
      if (w == s1) break;
    }
    std::vector<int> rest;
    rest.reserve(n_);
    for (int w = step(s1); w != a; w = step(w)) rest.push_back(w);
    const auto at = [&](int v) { return int(std::find(rest.begin(), rest.end(), v) - rest.begin()); };
    const int ic = at(c);
    const int ie = at(e);
    const int m = static_cast<int>(rest.size());
    // In rest order the segment enters between positions lo and lo + 1 (cyclically).
    const bool c_first = (ic + 1) % m == ie;
    const int lo = c_first ? ic : ie;
    if (a_at_c != c_first) std::reverse(segment.begin(), segment.end());
    order_.clear();
    order_.insert(order_.end(), rest.begin(), rest.begin() + lo + 1);
    order_.insert(order_.end(), segment.begin(), segment.end());
    order_.insert(order_.end(), rest.begin() + lo + 1, rest.end());
    reindex();
  }

  void activate(std::initializer_list<int> nodes) {
    for (int v : nodes) {
      if (!queued_[v]) {
        queued_[v] = 1;
        queue_.push_back(v);
      }
    }
  }

  void local_search(const std::vector<int>& start) {
    queued_.assign(n_, 0);
    queue_.clear();
    for (int v : start) activate({v});
    while (!queue_.empty()) {
      const int a = queue_.front();
      queue_.pop_front();
      queued_[a] = 0;
      if (improve_two_opt(a) || improve_or_opt(a)) activate({a});
    }
  }

  std::vector<int>& order_;
  Distances dist_;
  int n_;
  std::vector<int> pos_;
  std::vector<std::vector<int>> neighbors_;
  std::deque<int> queue_;
  std::vector<char> queued_;
};

}  // namespace

Metric parse_metric(const std::string& name) {
  if (name == "l1" || name == "L1") return Metric::L1;
  if (name == "l2" || name == "L2") return Metric::L2;
  throw ConfigError("unknown metric '" + name + "' (expected l1 or l2)");
}

std::string to_string(Metric metric) { return metric == Metric::L1 ? "l1" : "l2"; }

double tour_length(const std::vector<int>& order, const Points& points, Metric metric) {
  const std::size_t n = order.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    total += distance(points.col(order[k]), points.col(order[(k + 1) % n]), metric);
  }
  return total;
}

Tour nearest_neighbor_tour(const Points& points, Metric metric) {
  const int n = static_cast<int>(points.cols());
  Tour tour;
  if (n == 0) return tour;
  std::vector<char> visited(n, 0);
  tour.order.reserve(n);
  int current = 0;
  visited[0] = 1;
  tour.order.push_back(0);
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_d = 0.0;
    for (int j = 0; j < n; ++j) {
      if (visited[j]) continue;
      const double d = distance(points.col(current), points.col(j), metric);
      if (best < 0 || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    visited[best] = 1;
    tour.order.push_back(best);
    current = best;
  }
  tour.length = tour_length(tour.order, points, metric);
  return tour;
}

int improve_tour(std::vector<int>& order, const Points& points, Metric metric,
                 const TspOptions& options) {
  const Distances dist(points, metric);
  const int cap = options.move_cap_factor * static_cast<int>(order.size());
  int moves = 0;
  while (moves < cap) {
    moves += two_opt(order, dist, cap - moves);
    if (!options.or_opt || moves >= cap) break;
    const int relocated = or_opt(order, dist, cap - moves);
    moves += relocated;
    if (relocated == 0) break;
  }
  return moves;
}

Tour tsp_tour(const Points& points, Metric metric, const TspOptions& options) {
  Tour tour = nearest_neighbor_tour(points, metric);
  if (options.kicks_per_point > 0) {
    const int n = static_cast<int>(tour.order.size());
    TourSearch(tour.order, points, metric).run(options.kicks_per_point * n, options.seed);
  }
  improve_tour(tour.order, points, metric, options);
  tour.length = tour_length(tour.order, points, metric);
  return tour;
}

Instance::Instance(Points points, Point depot, Metric metric, const TspOptions& options)
    : points_(std::move(points)), depot_(std::move(depot)), metric_(metric) {
  tour_ = tsp_tour(points_, metric_, options);
  derive();
}

Instance::Instance(Points points, Point depot, Metric metric, Tour tour)
    : points_(std::move(points)), depot_(std::move(depot)), metric_(metric), tour_(std::move(tour)) {
  if (static_cast<int>(tour_.order.size()) != points_.cols()) {
    throw InvalidArgument("tour does not cover the instance");
  }
  tour_.length = tour_length(tour_.order, points_, metric_);
  derive();
}

void Instance::derive() {
  const int n = size();
  r_.resize(n);
  d_.resize(n);
  for (int p = 0; p < n; ++p) {
    r_[p] = distance(at(p), depot_, metric_);
    const int prev = (p + n - 1) % n;
    const int next = (p + 1) % n;
    d_[p] = 0.5 * (dist(prev, p) + dist(p, next));
  }
}

double route_length(const std::vector<int>& route, const Points& points, const Point& depot,
                    Metric metric) {
  if (route.empty()) return 0.0;
  double total = distance(depot, points.col(route.front()), metric) +
                 distance(points.col(route.back()), depot, metric);
  for (std::size_t k = 0; k + 1 < route.size(); ++k) {
    total += distance(points.col(route[k]), points.col(route[k + 1]), metric);
  }
  return total;
}

namespace {

void improve_route(std::vector<int>& route, const Points& points, const Point& depot,
                   Metric metric) {
  const int k = static_cast<int>(route.size());
  if (k < 3) return;
  Points local(2, k + 1);
  local.col(0) = depot;
  for (int j = 0; j < k; ++j) local.col(j + 1) = points.col(route[j]);
  std::vector<int> order(k + 1);
  std::iota(order.begin(), order.end(), 0);
  improve_tour(order, local, metric);
  const auto start = std::find(order.begin(), order.end(), 0);
  std::rotate(order.begin(), start, order.end());
  const std::vector<int> before = route;
  for (int j = 0; j < k; ++j) route[j] = before[order[j + 1] - 1];
}

// Inter-route local search on neighbour lists: relocate, swap and both 2-opt*
// variants, first improvement, capacity respected throughout.
class RouteSearch {
 public:
  RouteSearch(std::vector<std::vector<int>>& routes, const Points& points, const Point& depot,
              int capacity, Metric metric)
      : routes_(routes), points_(points), depot_(depot), capacity_(capacity), metric_(metric) {
    const int n = static_cast<int>(points.cols());
    route_of_.assign(n, -1);
    pos_of_.assign(n, -1);
    for (int r = 0; r < static_cast<int>(routes_.size()); ++r) reindex(r);
    neighbors_ = nearest_lists(points, metric, 12);
  }

  bool run(int max_passes = 200) {
    bool any = false;
    for (int pass = 0; pass < max_passes; ++pass) {
      bool improved = false;
      for (int u = 0; u < static_cast<int>(route_of_.size()); ++u) {
        for (int v : neighbors_[u]) {
          if (try_moves(u, v)) {
            improved = true;
            break;
          }
        }
      }
      if (!improved) break;
      any = true;
    }
    routes_.erase(std::remove_if(routes_.begin(), routes_.end(), [](const auto& r) { return r.empty(); }),
                  routes_.end());
    return any;
  }

 private:
  static constexpr int kDepot = -1;
  static constexpr double kEps = 1e-9;

  double dist(int a, int b) const {
    const auto pa = a == kDepot ? depot_ : Point(points_.col(a));
    const auto pb = b == kDepot ? depot_ : Point(points_.col(b));
    return distance(pa, pb, metric_);
  }
  int pred(int node) const {
    const int p = pos_of_[node];
    return p == 0 ? kDepot : routes_[route_of_[node]][p - 1];
  }
  int succ(int node) const {
    const auto& r = routes_[route_of_[node]];
    const int p = pos_of_[node];
    return p + 1 == static_cast<int>(r.size()) ? kDepot : r[p + 1];
  }
  int size_of(int node) const { return static_cast<int>(routes_[route_of_[node]].size()); }

  void reindex(int r) {
    for (int p = 0; p < static_cast<int>(routes_[r].size()); ++p) {
      route_of_[routes_[r][p]] = r;
      pos_of_[routes_[r][p]] = p;
    }
  }

  bool try_moves(int u, int v) {
    return relocate(u, v) || swap(u, v) || two_opt_star(u, v);
  }

  // Moves u next to v (after it, then before it).
  bool relocate(int u, int v) {
    const int ra = route_of_[u];
    const int rb = route_of_[v];
    if (ra != rb && size_of(v) + 1 > capacity_) return false;
    const int pu = pred(u);
    const int su = succ(u);
    const double gain = dist(pu, u) + dist(u, su) - dist(pu, su);
    const int pv = pred(v);
    const int sv = succ(v);
    const std::pair<int, int> edges[] = {{v, sv}, {pv, v}};
    for (int e = 0; e < 2; ++e) {
      const auto [x, y] = edges[e];
      if (x == u || y == u) continue;
      if (dist(x, u) + dist(u, y) - dist(x, y) - gain < -kEps) {
        auto& a = routes_[ra];
        a.erase(a.begin() + pos_of_[u]);
        reindex(ra);
        auto& b = routes_[rb];
        b.insert(b.begin() + pos_of_[v] + (e == 0 ? 1 : 0), u);
        reindex(rb);
        return true;
      }
    }
    return false;
  }

  bool swap(int u, int v) {
    const int ra = route_of_[u];
    const int rb = route_of_[v];
    if (ra == rb) return false;
    const int pu = pred(u), su = succ(u), pv = pred(v), sv = succ(v);
    const double delta = dist(pu, v) + dist(v, su) + dist(pv, u) + dist(u, sv) - dist(pu, u) -
                         dist(u, su) - dist(pv, v) - dist(v, sv);
    if (delta >= -kEps) return false;
    std::swap(routes_[ra][pos_of_[u]], routes_[rb][pos_of_[v]]);
    reindex(ra);
    reindex(rb);
    return true;
  }

  bool two_opt_star(int u, int v) {
    const int ra = route_of_[u];
    const int rb = route_of_[v];
    if (ra == rb) return false;
    auto& a = routes_[ra];
    auto& b = routes_[rb];
    const int i = pos_of_[u];
    const int j = pos_of_[v];
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    const int su = succ(u), pv = pred(v), sv = succ(v);

    // a[..i] + b[j..] and b[..j-1] + a[i+1..]
    if (i + 1 + nb - j <= capacity_ && j + na - i - 1 <= capacity_ &&
        dist(u, v) + dist(pv, su) - dist(u, su) - dist(pv, v) < -kEps) {
      std::vector<int> a2(a.begin(), a.begin() + i + 1);
      a2.insert(a2.end(), b.begin() + j, b.end());
      std::vector<int> b2(b.begin(), b.begin() + j);
      b2.insert(b2.end(), a.begin() + i + 1, a.end());
      a = std::move(a2);
      b = std::move(b2);
      reindex(ra);
      reindex(rb);
      return true;
    }
    // a[..i] + reverse(b[..j]) and reverse(a[i+1..]) + b[j+1..]
    if (i + 1 + j + 1 <= capacity_ && na - i - 1 + nb - j - 1 <= capacity_ &&
        dist(u, v) + dist(su, sv) - dist(u, su) - dist(v, sv) < -kEps) {
      std::vector<int> a2(a.begin(), a.begin() + i + 1);
      a2.insert(a2.end(), std::make_reverse_iterator(b.begin() + j + 1), b.rend());
      std::vector<int> b2(std::make_reverse_iterator(a.end()), std::make_reverse_iterator(a.begin() + i + 1));
      b2.insert(b2.end(), b.begin() + j + 1, b.end());
      a = std::move(a2);
      b = std::move(b2);
      reindex(ra);
      reindex(rb);
      return true;
    }
    return false;
  }

  std::vector<std::vector<int>>& routes_;
  const Points& points_;
  Point depot_;
  int capacity_;
  Metric metric_;
  std::vector<int> route_of_;
  std::vector<int> pos_of_;
  std::vector<std::vector<int>> neighbors_;
};

// Alternates the inter-route search with per-route local search until neither helps.
void polish(CvrpSolution& sol, const Points& points, const Point& depot, Metric metric) {
  for (int round = 0; round < 20; ++round) {
    RouteSearch search(sol.routes, points, depot, sol.capacity, metric);
    const bool moved = search.run();
    double total = 0.0;
    for (auto& r : sol.routes) {
      improve_route(r, points, depot, metric);
      total += route_length(r, points, depot, metric);
    }
    const bool shorter = total < sol.total_length - 1e-9;
    sol.total_length = total;
    if (!moved && !shorter) break;
  }
}

}  // namespace

CvrpSolution cvrp_savings(const Points& points, const Point& depot, int capacity, Metric metric) {
  if (capacity < 1) throw InvalidArgument("vehicle capacity must be >= 1");
  const int n = static_cast<int>(points.cols());
  CvrpSolution sol;
  sol.capacity = capacity;
  sol.method = "savings";
  if (n == 0) return sol;

  std::vector<double> radial(n);
  for (int i = 0; i < n; ++i) radial[i] = distance(points.col(i), depot, metric);

  struct Saving {
    double value;
    int i, j;
  };
  std::vector<Saving> savings;
  savings.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      savings.push_back({radial[i] + radial[j] - distance(points.col(i), points.col(j), metric), i, j});
    }
  }
  std::sort(savings.begin(), savings.end(), [](const Saving& a, const Saving& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  std::vector<std::vector<int>> routes(n);
  std::vector<int> route_of(n);
  for (int i = 0; i < n; ++i) {
    routes[i] = {i};
    route_of[i] = i;
  }
  for (const auto& s : savings) {
    const int ra = route_of[s.i];
    const int rb = route_of[s.j];
    if (ra == rb) continue;
    auto& a = routes[ra];
    auto& b = routes[rb];
    if (static_cast<int>(a.size() + b.size()) > capacity) continue;
    const bool i_end = a.front() == s.i || a.back() == s.i;
    const bool j_end = b.front() == s.j || b.back() == s.j;
    if (!i_end || !j_end) continue;
    if (a.back() != s.i) std::reverse(a.begin(), a.end());
    if (b.front() != s.j) std::reverse(b.begin(), b.end());
    for (int node : b) route_of[node] = ra;
    a.insert(a.end(), b.begin(), b.end());
    b.clear();
  }

  for (auto& r : routes) {
    if (r.empty()) continue;
    improve_route(r, points, depot, metric);
    sol.total_length += route_length(r, points, depot, metric);
    sol.routes.push_back(std::move(r));
  }
  return sol;
}

CvrpSolution cvrp_split(const Points& points, const Point& depot, int capacity, Metric metric,
                        const Tour& tour) {
  if (capacity < 1) throw InvalidArgument("vehicle capacity must be >= 1");
  const int n = static_cast<int>(points.cols());
  if (static_cast<int>(tour.order.size()) != n) throw InvalidArgument("tour does not cover the points");
  CvrpSolution sol;
  sol.capacity = capacity;
  sol.method = "split";
  if (n == 0) return sol;

  std::vector<double> radial(n);
  for (int i = 0; i < n; ++i) radial[i] = distance(points.col(i), depot, metric);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Some cut falls among any `capacity` consecutive tour edges, so rotations
  // 0..capacity-1 cover every cyclic split.
  double best = kInf;
  std::vector<int> best_seq;
  std::vector<int> best_parent;
  std::vector<int> seq(n);
  std::vector<double> prefix(n);
  std::vector<double> f(n + 1);
  std::vector<int> parent(n + 1);
  for (int s = 0; s < std::min(capacity, n); ++s) {
    for (int q = 0; q < n; ++q) seq[q] = tour.order[(s + q) % n];
    prefix[0] = 0.0;
    for (int q = 1; q < n; ++q) {
      prefix[q] = prefix[q - 1] + distance(points.col(seq[q - 1]), points.col(seq[q]), metric);
    }
    f[0] = 0.0;
    for (int b = 0; b < n; ++b) {
      f[b + 1] = kInf;
      for (int a = std::max(0, b - capacity + 1); a <= b; ++a) {
        const double c = f[a] + radial[seq[a]] + prefix[b] - prefix[a] + radial[seq[b]];
        if (c < f[b + 1]) {
          f[b + 1] = c;
          parent[b + 1] = a;
        }
      }
    }
    if (f[n] < best) {
      best = f[n];
      best_seq = seq;
      best_parent = parent;
    }
  }

  for (int b = n; b > 0; b = best_parent[b]) {
    const int a = best_parent[b];
    sol.routes.emplace_back(best_seq.begin() + a, best_seq.begin() + b);
  }
  std::reverse(sol.routes.begin(), sol.routes.end());
  for (auto& r : sol.routes) {
    improve_route(r, points, depot, metric);
    sol.total_length += route_length(r, points, depot, metric);
  }
  return sol;
}

CvrpSolution cvrp_solve(const Points& points, const Point& depot, int capacity, Metric metric,
                        const Tour* tour) {
  auto savings = cvrp_savings(points, depot, capacity, metric);
  if (points.cols() == 0) return savings;
  const Tour own = tour ? Tour{} : tsp_tour(points, metric);
  auto split = cvrp_split(points, depot, capacity, metric, tour ? *tour : own);
  polish(savings, points, depot, metric);
  polish(split, points, depot, metric);
  return split.total_length < savings.total_length ? split : savings;
}

CvrpBounds cvrp_bounds(const Points& points, const Point& depot, int capacity, double tsp_len,
                       Metric metric) {
  if (capacity < 1) throw InvalidArgument("vehicle capacity must be >= 1");
  const int n = static_cast<int>(points.cols());
  double r_bar = 0.0;
  for (int i = 0; i < n; ++i) r_bar += distance(points.col(i), depot, metric);
  if (n > 0) r_bar /= n;
  const double v = capacity;
  return {std::max(2.0 * n * r_bar / v, tsp_len), 2.0 * (n / v + 1.0) * r_bar + tsp_len};
}

double cvrp_continuous(double k, double r_bar, double area, int capacity, double beta) {
  if (k <= 0.0) return 0.0;
  return 2.0 * k * r_bar / capacity + beta * std::sqrt(k * area);
}

NeighborDensity neighbor_density(const Tour& tour, const Points& points, Metric metric, int bins,
                                 double range_max) {
  const int n = static_cast<int>(tour.order.size());
  if (n < 2) throw InvalidArgument("neighbour density needs a tour over at least 2 points");
  if (bins < 1) throw InvalidArgument("neighbour density needs at least one bin");

  NeighborDensity out;
  out.samples.resize(n);
  for (int k = 0; k < n; ++k) {
    out.samples[k] = distance(points.col(tour.order[k]), points.col(tour.order[(k + 1) % n]), metric);
  }
  const Eigen::Map<const Eigen::VectorXd> s(out.samples.data(), n);
  out.mean = s.mean();
  out.sd = std::sqrt((s.array() - out.mean).square().mean());

  std::vector<double> sorted = out.samples;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&sorted](double q) {
    const double pos = q * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  };
  out.q75 = quantile(0.75);
  out.q95 = quantile(0.95);

  double top = range_max > 0.0 ? range_max : sorted.back();
  if (top <= 0.0) top = 1.0;
  out.bin_width = top / bins;
  out.density = Eigen::VectorXd::Zero(bins);
  for (double x : out.samples) {
    const int b = std::min(bins - 1, static_cast<int>(x / out.bin_width));
    out.density[b] += 1.0;
  }
  out.density /= n * out.bin_width;
  return out;
}

Points read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file '" + path + "'");
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  ++line_no;
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\r'; }),
             line.end());
  if (line != "x,y") throw ConfigError(path + ":1: expected header 'x,y'");

  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream row(line);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(row >> x >> comma >> y) || comma != ',') {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'x,y' numbers");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  Points pts(2, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) pts.col(static_cast<Eigen::Index>(k)) << xs[k], ys[k];
  return pts;
}

}  // namespace dsp
