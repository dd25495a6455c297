#include "drumlab/weyl_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "drumlab/errors.hpp"

namespace drumlab {

SpectrumExtraction extract_spectrum(const LocalWeylTable& table) {
  require(static_cast<int>(table.fields.cols()) == table.size(), ErrorCode::CorruptTable,
          "table has " + std::to_string(table.fields.cols()) + " fields for " +
              std::to_string(table.size()) + " frequencies");
  SpectrumExtraction out;
  out.frequencies = table.frequencies;
  out.amplitudes.resize(table.fields.rows(), table.fields.cols());
  for (Eigen::Index j = 0; j < table.fields.cols(); ++j) {
    for (Eigen::Index x = 0; x < table.fields.rows(); ++x) {
      double E = table.fields(x, j);
      if (!(E >= -1e-12))
        fail(ErrorCode::CorruptTable, "jump " + std::to_string(j) + " is negative (" +
                                          std::to_string(E) + ") at vertex " + std::to_string(x));
      out.amplitudes(x, j) = std::sqrt(std::max(E, 0.0));
    }
  }
  return out;
}

SimplicityDiagnostics check_simplicity(const std::vector<double>& frequencies, double gap_tol) {
  SimplicityDiagnostics d;
  const int n = static_cast<int>(frequencies.size());
  for (int j = 0; j + 1 < n;) {
    int k = j;
    while (k + 1 < n && frequencies[k + 1] - frequencies[k] < gap_tol) ++k;
    if (k > j) {
      std::vector<int> c;
      for (int i = j; i <= k; ++i) c.push_back(i);
      d.close_clusters.push_back(std::move(c));
    }
    j = k + 1;
  }
  return d;
}

SimplicityDiagnostics check_simplicity(const LocalWeylTable& table, double gap_tol) {
  SimplicityDiagnostics d = check_simplicity(table.frequencies, gap_tol);
  for (int j = 0; j < table.size(); ++j) {
    const double integral = table.fields.col(j).dot(table.weights);
    d.jump_integrals.push_back(integral);
    if (std::fabs(integral - 1.0) > 0.01) d.mass_flags.push_back(j);
  }
  return d;
}

std::vector<EdgeChain> edge_chains(const Mesh& mesh) {
  const int n = mesh.num_vertices();
  const auto nb = vertex_neighbors(mesh);
  auto disp = [&](int u, int v) { return displacement(mesh, mesh.vertices[u], mesh.vertices[v]); };
  auto same_step = [](const Point& a, const Point& b) {
    const double scale = std::hypot(a[0], a[1]);
    return std::hypot(a[0] - b[0], a[1] - b[1]) <= 1e-6 * scale;
  };
  // canonical direction: positive x, or zero x and positive y
  auto forward = [](const Point& d) {
    const double eps = 1e-12 * (std::fabs(d[0]) + std::fabs(d[1]));
    return d[0] > eps || (std::fabs(d[0]) <= eps && d[1] > 0);
  };
  auto next = [&](int u, int v) {
    const Point d = disp(u, v);
    for (int w : nb[v])
      if (w != u && same_step(d, disp(v, w))) return w;
    return -1;
  };
  auto prev = [&](int u, int v) {
    const Point d = disp(u, v);
    for (int t : nb[u])
      if (t != v && same_step(d, disp(t, u))) return t;
    return -1;
  };

  std::set<std::pair<int, int>> seen;  // directed canonical edges
  std::vector<EdgeChain> chains;
  auto walk = [&](int u, int v) {
    EdgeChain c;
    c.vertices.push_back(u);
    while (v >= 0 && !seen.count({u, v})) {
      seen.insert({u, v});
      if (v == c.vertices.front()) {
        c.cyclic = true;
        break;
      }
      c.vertices.push_back(v);
      const int w = next(u, v);
      u = v;
      v = w;
    }
    chains.push_back(std::move(c));
  };
  // open chains first, from their starting edges
  for (int u = 0; u < n; ++u)
    for (int v : nb[u])
      if (forward(disp(u, v)) && prev(u, v) < 0 && !seen.count({u, v})) walk(u, v);
  for (int u = 0; u < n; ++u)
    for (int v : nb[u])
      if (forward(disp(u, v)) && !seen.count({u, v})) walk(u, v);
  return chains;
}

ChainRelations chain_relations(const std::vector<double>& a, bool cyclic) {
  const int n = static_cast<int>(a.size());
  ChainRelations r;
  const int edges = cyclic ? n : std::max(0, n - 1);
  const int skips = cyclic ? n : std::max(0, n - 2);
  r.flip.assign(edges, 0);
  r.flip_margin.assign(edges, 0.0);
  r.skip_flip.assign(skips, 0);
  r.skip_margin.assign(skips, 0.0);
  const int order = std::min(4, n - 1);
  if (order < 2) return r;  // too short to say anything

  // closed chains are padded on both sides so every edge sees full windows
  std::vector<double> x;
  const int offset = cyclic ? order : 0;
  if (cyclic) x.insert(x.end(), a.end() - order, a.end());
  x.insert(x.end(), a.begin(), a.end());
  if (cyclic) x.insert(x.end(), a.begin(), a.begin() + order);
  const int len = static_cast<int>(x.size());

  // binomial difference coefficients with alternating sign
  std::vector<double> c(order + 1, 1.0);
  for (int k = 1; k <= order; ++k) c[k] = -c[k - 1] * (order - k + 1) / k;

  // state at position i: bit k is the sign of point i - k (1 = negative)
  const int nstates = 1 << order;
  const int mask = nstates - 1;
  const double inf = std::numeric_limits<double>::infinity();
  auto window_cost = [&](int i, int full) {
    double d = 0.0;
    for (int k = 0; k <= order; ++k) d += c[k] * (((full >> (order - k)) & 1) ? -1.0 : 1.0) * x[i - order + k];
    return d * d;
  };

  // forward costs; the first point is fixed positive
  std::vector<std::vector<double>> alpha(len, std::vector<double>(nstates, inf));
  for (int st = 0; st < nstates; ++st)
    if (((st >> (order - 1)) & 1) == 0) alpha[order - 1][st] = 0.0;
  for (int i = order; i < len; ++i)
    for (int st = 0; st < nstates; ++st) {
      if (alpha[i - 1][st] == inf) continue;
      for (int bit = 0; bit < 2; ++bit) {
        const int full = (st << 1) | bit;
        const double v = alpha[i - 1][st] + window_cost(i, full);
        double& dst = alpha[i][full & mask];
        dst = std::min(dst, v);
      }
    }
  std::vector<std::vector<double>> beta(len, std::vector<double>(nstates, inf));
  for (int st = 0; st < nstates; ++st) beta[len - 1][st] = 0.0;
  for (int i = len - 1; i >= order; --i)
    for (int st = 0; st < nstates; ++st)
      for (int bit = 0; bit < 2; ++bit) {
        const int full = (st << 1) | bit;
        const double v = window_cost(i, full) + beta[i][full & mask];
        beta[i - 1][st] = std::min(beta[i - 1][st], v);
      }

  // relation between points p and q = p + gap, read off the transition into
  // position i = max(q, order), whose window holds points i - order .. i
  auto relation = [&](int p, int gap, char& flip, double& margin) {
    const int i = std::max(p + gap, order);
    double best[2] = {inf, inf};
    for (int st = 0; st < nstates; ++st) {
      if (alpha[i - 1][st] == inf) continue;
      for (int bit = 0; bit < 2; ++bit) {
        const int full = (st << 1) | bit;
        const double v = alpha[i - 1][st] + window_cost(i, full) + beta[i][full & mask];
        const int rel = ((full >> (i - p)) ^ (full >> (i - p - gap))) & 1;
        best[rel] = std::min(best[rel], v);
      }
    }
    flip = best[1] < best[0];
    margin = std::fabs(best[1] - best[0]);
  };
  for (int p = 0; p < edges; ++p) relation(p + offset, 1, r.flip[p], r.flip_margin[p]);
  for (int p = 0; p < skips; ++p) relation(p + offset, 2, r.skip_flip[p], r.skip_margin[p]);
  return r;
}

NodalPartition nodal_partition(const Eigen::VectorXd& amplitude, const Mesh& mesh,
                               double zero_tol, double conflict_tol) {
  const int n = mesh.num_vertices();
  require(amplitude.size() == n, ErrorCode::DimensionMismatch,
          "field has " + std::to_string(amplitude.size()) + " values for " + std::to_string(n) +
              " vertices");
  NodalPartition p;
  p.zero_tol = zero_tol;
  p.label.assign(n, kNodal);
  const double amax = amplitude.maxCoeff();
  const double cut = zero_tol * amax;
  std::vector<char> live(n, 0);
  bool any = false;
  for (int v = 0; v < n; ++v) {
    require(amplitude[v] >= 0.0, ErrorCode::CorruptTable,
            "amplitude is negative at vertex " + std::to_string(v));
    live[v] = amplitude[v] > cut;
    any = any || live[v];
  }
  require(any, ErrorCode::DegenerateField, "every vertex is nodal");

  struct Relation {
    int u, v;
    bool flip;
    double margin;
    bool bridge;
  };
  std::vector<Relation> rels;
  for (const EdgeChain& chain : edge_chains(mesh)) {
    const int len = static_cast<int>(chain.vertices.size());
    std::vector<double> a(len);
    for (int i = 0; i < len; ++i) a[i] = live[chain.vertices[i]] ? amplitude[chain.vertices[i]] : 0.0;
    const ChainRelations cr = chain_relations(a, chain.cyclic);
    auto vert = [&](int i) { return chain.vertices[i % len]; };
    for (size_t i = 0; i < cr.flip.size(); ++i) {
      const int u = vert(static_cast<int>(i)), v = vert(static_cast<int>(i) + 1);
      if (live[u] && live[v]) rels.push_back({u, v, cr.flip[i] != 0, cr.flip_margin[i], false});
    }
    for (size_t i = 0; i < cr.skip_flip.size(); ++i) {
      const int u = vert(static_cast<int>(i)), v = vert(static_cast<int>(i) + 1), w = vert(static_cast<int>(i) + 2);
      if (live[u] && !live[v] && live[w] && u != w)
        rels.push_back({u, w, cr.skip_flip[i] != 0, cr.skip_margin[i], true});
    }
  }

  // most confident relations first; union-find carrying the sign parity
  std::stable_sort(rels.begin(), rels.end(),
                   [](const Relation& x, const Relation& y) { return x.margin > y.margin; });
  std::vector<int> parent(n), parity(n, 0);
  for (int v = 0; v < n; ++v) parent[v] = v;
  std::function<int(int)> find = [&](int v) {
    if (parent[v] == v) return v;
    const int root = find(parent[v]);
    parity[v] ^= parity[parent[v]];
    parent[v] = root;
    return root;
  };
  const double scale = amax * amax;
  for (const Relation& r : rels) {
    const int ru = find(r.u), rv = find(r.v);
    const int want = r.flip ? 1 : 0;
    if (ru != rv) {
      parent[rv] = ru;
      parity[rv] = parity[r.u] ^ parity[r.v] ^ want;
    } else if ((parity[r.u] ^ parity[r.v]) != want) {
      p.max_conflict = std::max(p.max_conflict, r.margin / scale);
      if (r.margin <= conflict_tol * scale) continue;
      std::ostringstream os;
      os << "sign relation between vertices " << r.u << " and " << r.v << " contradicts stronger evidence"
         << " (margin " << r.margin / scale << " of max amplitude squared)";
      fail(ErrorCode::Inconsistency, os.str());
    }
  }
  std::vector<int> sign(n, 0);
  for (int v = 0; v < n; ++v)
    if (live[v]) {
      find(v);
      sign[v] = parity[v] ? -1 : 1;
    }

  std::set<std::pair<int, int>> crossing, bridge;
  for (const Relation& r : rels)
    if (sign[r.u] != sign[r.v]) (r.bridge ? bridge : crossing).insert({std::min(r.u, r.v), std::max(r.u, r.v)});
  p.crossings.assign(crossing.begin(), crossing.end());
  p.bridges.assign(bridge.begin(), bridge.end());

  const auto nb = vertex_neighbors(mesh);
  for (int s = 0; s < n; ++s) {
    if (!live[s] || p.label[s] != kNodal) continue;
    const int id = ++p.m;
    std::queue<int> q;
    q.push(s);
    p.label[s] = id;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : nb[u])
        if (live[v] && p.label[v] == kNodal && sign[v] == sign[u]) {
          p.label[v] = id;
          q.push(v);
        }
    }
  }
  return p;
}

int default_min_links(int dimension) { return dimension >= 2 ? 2 : 1; }

DomainGraph adjacency_graph(const NodalPartition& partition, const Mesh& mesh,
                            const Eigen::VectorXd& amplitude, int min_links) {
  (void)amplitude;  // the partition already encodes the nodal set
  const int n = mesh.num_vertices();
  require(static_cast<int>(partition.label.size()) == n, ErrorCode::DimensionMismatch,
          "partition does not match the mesh");
  const auto& L = partition.label;

  // distinct vertex pairs linking two domains: crossing edges and bridges
  // over one nodal vertex
  std::set<std::pair<int, int>> pairs;
  for (const auto& [u, v] : partition.crossings)
    if (L[u] != kNodal && L[v] != kNodal) pairs.emplace(u, v);
  for (const auto& [u, w] : partition.bridges)
    if (L[u] != kNodal && L[w] != kNodal) pairs.emplace(u, w);
  std::map<std::pair<int, int>, int> count;
  for (const auto& [u, w] : pairs) {
    const int a = std::min(L[u], L[w]);
    const int b = std::max(L[u], L[w]);
    ++count[{a, b}];
  }

  DomainGraph g;
  g.m = partition.m;
  g.neighbors.assign(g.m + 1, {});
  g.link_counts.assign(g.m + 1, {});
  for (const auto& [ab, c] : count) {
    if (c < min_links && ab.first != ab.second) continue;
    g.edges.push_back(ab);
    g.neighbors[ab.first].push_back(ab.second);
    g.link_counts[ab.first].push_back(c);
    if (ab.first == ab.second) continue;  // a sign change inside one domain
    g.neighbors[ab.second].push_back(ab.first);
    g.link_counts[ab.second].push_back(c);
  }
  return g;
}

SignAssignment propagate_signs(const DomainGraph& graph) {
  const int m = graph.m;
  require(m >= 1, ErrorCode::Connectivity, "graph has no domains");
  for (const auto& [i, j] : graph.edges)
    if (i == j)
      fail(ErrorCode::Inconsistency, "domain " + std::to_string(i) +
                                         " is adjacent to itself: a sign change inside one domain "
                                         "(check zero_tol / adjacency_min_links)");
  SignAssignment s;
  s.delta.assign(m + 1, 0);
  std::vector<int> parent(m + 1, 0);
  std::vector<int> level(m + 1, -1);
  s.delta[1] = 1;
  level[1] = 0;
  std::vector<int> frontier{1};
  std::vector<int> assigned{1};
  s.iteration_trace.push_back(assigned);

  auto path_to_root = [&](int x) {
    std::vector<int> p;
    for (; x != 0; x = parent[x]) p.push_back(x);
    return p;
  };

  while (!frontier.empty()) {
    std::vector<int> next;
    for (int j : frontier) {
      for (int k : graph.neighbors[j]) {
        if (s.delta[k] == 0) {
          s.delta[k] = -s.delta[j];
          parent[k] = j;
          level[k] = level[j] + 1;
          next.push_back(k);
        } else if (s.delta[k] == s.delta[j]) {
          // odd cycle: j -> ... -> common ancestor <- ... <- k
          auto pj = path_to_root(j);
          auto pk = path_to_root(k);
          while (pj.size() > 1 && pk.size() > 1 && pj[pj.size() - 2] == pk[pk.size() - 2]) {
            pj.pop_back();
            pk.pop_back();
          }
          std::ostringstream os;
          os << "adjacency graph has an odd cycle through domains";
          for (int x : pj) os << ' ' << x;
          for (auto it = pk.rbegin() + 1; it != pk.rend(); ++it) os << ' ' << *it;
          os << " (check zero_tol / adjacency_min_links)";
          fail(ErrorCode::Inconsistency, os.str());
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    assigned.insert(assigned.end(), next.begin(), next.end());
    std::sort(assigned.begin(), assigned.end());
    s.iteration_trace.push_back(assigned);
    frontier = std::move(next);
  }
  if (static_cast<int>(assigned.size()) != m) {
    std::ostringstream os;
    os << "adjacency graph is disconnected: reached " << assigned.size() << " of " << m
       << " domains; unreached:";
    for (int k = 1; k <= m; ++k)
      if (s.delta[k] == 0) os << ' ' << k;
    fail(ErrorCode::Connectivity, os.str());
  }
  return s;
}

Eigen::VectorXd recover_eigenfunction(const Eigen::VectorXd& amplitude,
                                      const NodalPartition& partition,
                                      const SignAssignment& signs) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(amplitude.size());
  for (Eigen::Index x = 0; x < amplitude.size(); ++x) {
    const int id = partition.label[x];
    if (id != kNodal) e[x] = signs.delta[id] * amplitude[x];
  }
  normalize_sign(e);
  return e;
}

Step1Result recover_step1(const LocalWeylTable& table, const Mesh& mesh,
                          const Step1Options& options) {
  require(table.num_vertices() == mesh.num_vertices(), ErrorCode::DimensionMismatch,
          "table has " + std::to_string(table.num_vertices()) + " vertices, mesh has " +
              std::to_string(mesh.num_vertices()));
  Step1Result r;
  r.simplicity = check_simplicity(table, options.gap_tol);
  if (!r.simplicity.simple()) {
    std::ostringstream os;
    os << "spectrum is not simple:";
    for (const auto& c : r.simplicity.close_clusters)
      os << " jumps " << c.front() << ".." << c.back() << " closer than gap_tol;";
    for (int j : r.simplicity.mass_flags)
      os << " jump " << j << " at lambda " << table.frequencies[j] << " integrates to "
         << r.simplicity.jump_integrals[j] << ";";
    throw Error(ErrorCode::NonSimpleSpectrum, "check_simplicity", os.str());
  }

  const SpectrumExtraction ex = extract_spectrum(table);
  const int min_links = options.min_links > 0 ? options.min_links : default_min_links(mesh.dimension);
  r.frequencies = ex.frequencies;
  r.weights = table.weights;
  r.bc = table.bc;
  r.fields.resize(ex.amplitudes.rows(), ex.amplitudes.cols());
  for (Eigen::Index j = 0; j < ex.amplitudes.cols(); ++j) {
    const Eigen::VectorXd amp = ex.amplitudes.col(j);
    try {
      const NodalPartition p = nodal_partition(amp, mesh, options.zero_tol, options.conflict_tol);
      const DomainGraph g = adjacency_graph(p, mesh, amp, min_links);
      const SignAssignment s = propagate_signs(g);
      r.fields.col(j) = recover_eigenfunction(amp, p, s);
      r.modes.push_back({p.m, static_cast<int>(g.edges.size()),
                         static_cast<int>(s.iteration_trace.size()), true, p.max_conflict});
    } catch (const Error& e) {
      throw Error(e.code(), "step1",
                  "mode " + std::to_string(j) + " (lambda " + std::to_string(r.frequencies[j]) +
                      "): " + e.what());
    }
  }
  return r;
}

}  // namespace drumlab
