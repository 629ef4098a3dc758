// graph.hpp: simple undirected graphs, incidence, and the derived graphs
// (line graph, total graph, Q/R/subdivision variants).
//
// Indexing conventions, fixed so every spectrum and eigenvector downstream is
// bit-for-bit reproducible:
//   - edges are kept sorted lexicographically as (u, v) with u < v;
//   - complete_bipartite(n1, n2) puts the first part at 0..n1-1, the second at
//     n1..n1+n2-1, so edge (i, n1+j) has index i*n2 + j;
//   - total_graph lists the n root vertices first, then the m root edges.
#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace totalwalk {

struct Edge {
    int u = 0, v = 0;  // u < v
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Graph {
public:
    Graph() = default;

    static Graph from_edges(int n, std::vector<Edge> edges) {
        if (n < 0) throw std::invalid_argument("graph: negative vertex count");
        for (Edge& e : edges) {
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.u == e.v) throw std::invalid_argument("graph: self-loop rejected");
            if (e.u < 0 || e.v >= n) throw std::invalid_argument("graph: endpoint out of range");
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw std::invalid_argument("graph: duplicate edge rejected");
        Graph g;
        g.n_ = n;
        g.edges_ = std::move(edges);
        g.degrees_.assign(n, 0);
        g.neighbors_.assign(n, {});
        for (const Edge& e : g.edges_) {
            ++g.degrees_[e.u];
            ++g.degrees_[e.v];
            g.neighbors_[e.u].push_back(e.v);
            g.neighbors_[e.v].push_back(e.u);
        }
        for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());
        return g;
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& degrees() const { return degrees_; }
    int degree(int v) const { return degrees_.at(v); }
    const std::vector<int>& neighbors(int v) const { return neighbors_.at(v); }

    bool adjacent(int u, int v) const {
        if (u == v) return false;
        return edge_index(u, v) >= 0;
    }

    // Index into the canonical edge list, or -1.
    int edge_index(int u, int v) const {
        if (u > v) std::swap(u, v);
        Edge probe{u, v};
        auto it = std::lower_bound(edges_.begin(), edges_.end(), probe);
        if (it == edges_.end() || !(*it == probe)) return -1;
        return static_cast<int>(it - edges_.begin());
    }

    IntMatrix adjacency() const {
        IntMatrix a(n_, n_);
        for (const Edge& e : edges_) {
            a(e.u, e.v) = 1;
            a(e.v, e.u) = 1;
        }
        return a;
    }

    // Degree r if the graph is r-regular, -1 otherwise.
    int regularity() const {
        if (n_ == 0) return -1;
        int r = degrees_[0];
        for (int d : degrees_)
            if (d != r) return -1;
        return r;
    }

    bool is_regular() const { return regularity() >= 0; }

    bool is_connected() const {
        if (n_ == 0) return true;
        std::vector<char> seen(n_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : neighbors_[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
        }
        return count == n_;
    }

    // Two-coloring {0,1} if bipartite, nullopt otherwise. Unreached vertices
    // (disconnected graphs) get color 0.
    std::optional<std::vector<int>> bipartition() const {
        std::vector<int> color(n_, -1);
        for (int start = 0; start < n_; ++start) {
            if (color[start] >= 0) continue;
            color[start] = 0;
            std::vector<int> stack{start};
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w : neighbors_[v]) {
                    if (color[w] < 0) {
                        color[w] = 1 - color[v];
                        stack.push_back(w);
                    } else if (color[w] == color[v]) {
                        return std::nullopt;
                    }
                }
            }
        }
        return color;
    }

    bool is_bipartite() const { return bipartition().has_value(); }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> degrees_;
    std::vector<std::vector<int>> neighbors_;
};

inline Graph complete_graph(int n) {
    if (n < 1) throw std::invalid_argument("complete_graph: n must be >= 1");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
    return Graph::from_edges(n, std::move(edges));
}

inline Graph complete_bipartite(int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("complete_bipartite: part sizes must be >= 1");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) edges.push_back({i, n1 + j});
    return Graph::from_edges(n1 + n2, std::move(edges));
}

inline Graph cycle_graph(int k) {
    if (k < 3) throw std::invalid_argument("cycle_graph: k must be >= 3");
    std::vector<Edge> edges;
    edges.reserve(k);
    for (int i = 0; i < k; ++i) edges.push_back({i, (i + 1) % k});
    return Graph::from_edges(k, std::move(edges));
}

inline Graph path_graph(int k) {
    if (k < 1) throw std::invalid_argument("path_graph: k must be >= 1");
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < k; ++i) edges.push_back({i, i + 1});
    return Graph::from_edges(k, std::move(edges));
}

inline Graph petersen_graph() {
    std::vector<Edge> edges;
    for (int i = 0; i < 5; ++i) {
        edges.push_back({i, (i + 1) % 5});          // outer cycle
        edges.push_back({i, i + 5});                // spokes
        edges.push_back({5 + i, 5 + (i + 2) % 5});  // inner pentagram
    }
    return Graph::from_edges(10, std::move(edges));
}

using IncidenceMatrix = IntMatrix;

// n x m matrix R with R(i, j) = 1 iff edge j touches vertex i.
inline IncidenceMatrix incidence_matrix(const Graph& g) {
    IncidenceMatrix r(g.vertex_count(), g.edge_count());
    const auto& edges = g.edges();
    for (std::size_t j = 0; j < edges.size(); ++j) {
        r(edges[j].u, j) = 1;
        r(edges[j].v, j) = 1;
    }
    return r;
}

inline Graph line_graph(const Graph& g) {
    if (g.edge_count() < 1) throw std::invalid_argument("line_graph: graph has no edges");
    const int m = g.edge_count();
    std::vector<std::vector<int>> incident(g.vertex_count());
    const auto& edges = g.edges();
    for (int j = 0; j < m; ++j) {
        incident[edges[j].u].push_back(j);
        incident[edges[j].v].push_back(j);
    }
    std::vector<Edge> le;
    for (const auto& at : incident)
        for (std::size_t a = 0; a < at.size(); ++a)
            for (std::size_t b = a + 1; b < at.size(); ++b) le.push_back({at[a], at[b]});
    // two simple edges share at most one endpoint, so no duplicates arise
    return Graph::from_edges(m, std::move(le));
}

struct ElementLabel {
    enum class Kind { vertex, edge };
    Kind kind = Kind::vertex;
    int index = 0;

    static ElementLabel vertex(int i) { return {Kind::vertex, i}; }
    static ElementLabel edge(int j) { return {Kind::edge, j}; }
    friend bool operator==(const ElementLabel&, const ElementLabel&) = default;
};

// Total graph T(G) on V(G) u E(G): elements are adjacent iff they are
// adjacent vertices, edges sharing an endpoint, or an incident vertex/edge
// pair. Root vertices occupy indices 0..n-1, root edges n..n+m-1.
struct TotalGraph {
    Graph graph;
    std::vector<ElementLabel> labels;
    int root_n = 0;
    int root_m = 0;

    int index_of(ElementLabel l) const {
        if (l.kind == ElementLabel::Kind::vertex) {
            if (l.index < 0 || l.index >= root_n) throw std::invalid_argument("total graph: vertex label out of range");
            return l.index;
        }
        if (l.index < 0 || l.index >= root_m) throw std::invalid_argument("total graph: edge label out of range");
        return root_n + l.index;
    }
};

namespace detail {

// The three block families of E(T(G)). Selecting subsets yields T, Q, R, S.
inline std::vector<Edge> total_edges(const Graph& g, bool vertex_block, bool edge_block) {
    const int n = g.vertex_count();
    std::vector<Edge> edges;
    if (vertex_block)
        for (const Edge& e : g.edges()) edges.push_back(e);
    const auto& root = g.edges();
    for (std::size_t j = 0; j < root.size(); ++j) {
        edges.push_back({root[j].u, n + static_cast<int>(j)});
        edges.push_back({root[j].v, n + static_cast<int>(j)});
    }
    if (edge_block && g.edge_count() > 0) {
        Graph lg = line_graph(g);
        for (const Edge& e : lg.edges()) edges.push_back({n + e.u, n + e.v});
    }
    return edges;
}

}  // namespace detail

inline TotalGraph total_graph(const Graph& g) {
    const int n = g.vertex_count(), m = g.edge_count();
    TotalGraph t;
    t.graph = Graph::from_edges(n + m, detail::total_edges(g, true, true));
    t.root_n = n;
    t.root_m = m;
    t.labels.reserve(n + m);
    for (int i = 0; i < n; ++i) t.labels.push_back(ElementLabel::vertex(i));
    for (int j = 0; j < m; ++j) t.labels.push_back(ElementLabel::edge(j));
    return t;
}

// T(G) minus the vertex-vertex edges.
inline Graph q_graph(const Graph& g) {
    return Graph::from_edges(g.vertex_count() + g.edge_count(), detail::total_edges(g, false, true));
}

// T(G) minus the edge-edge edges.
inline Graph r_graph(const Graph& g) {
    return Graph::from_edges(g.vertex_count() + g.edge_count(), detail::total_edges(g, true, false));
}

// Incidence blocks only: every root edge becomes a degree-2 vertex.
inline Graph subdivision_graph(const Graph& g) {
    return Graph::from_edges(g.vertex_count() + g.edge_count(), detail::total_edges(g, false, false));
}

// ---- plain-text edge list: "n m" header, then one "u v" line per edge ----

inline std::string write_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.vertex_count() << ' ' << g.edge_count() << '\n';
    for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
    return out.str();
}

inline Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    long long n = -1, m = -1;
    if (!(in >> n >> m) || n < 0 || m < 0 || n > 1000000 || m > 100000000)
        throw std::invalid_argument("edge list: malformed header");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    for (long long j = 0; j < m; ++j) {
        long long u, v;
        if (!(in >> u >> v)) throw std::invalid_argument("edge list: truncated");
        if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge list: endpoint out of range");
        edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    }
    return Graph::from_edges(static_cast<int>(n), std::move(edges));
}

inline void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << write_edge_list(g);
}

inline Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open edge list: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str());
}

}  // namespace totalwalk
