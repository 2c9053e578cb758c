#include "plg/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "plg/error.hpp"

namespace plg {

namespace {
constexpr int kInfiniteDist = std::numeric_limits<int>::max();
}

FlowGraph::FlowGraph(int n_nodes) {
    if (n_nodes < 0) throw Error("FlowGraph: negative node count");
    nodes_.resize(static_cast<std::size_t>(n_nodes));
}

void FlowGraph::add_terminal_weights(int node, double source_cap, double sink_cap) {
    if (!(source_cap >= 0) || !(sink_cap >= 0))
        throw Error("FlowGraph: terminal capacities must be finite and non-negative");
    Node& n = nodes_.at(static_cast<std::size_t>(node));
    const double delta = n.tr_cap;
    if (delta > 0)
        source_cap += delta;
    else
        sink_cap -= delta;
    // Flow through s -> node -> t is pushed immediately.
    flow_ += std::min(source_cap, sink_cap);
    n.tr_cap = source_cap - sink_cap;
    solved_ = false;
}

void FlowGraph::add_edge(int u, int v, double cap, double rev_cap) {
    if (!(cap >= 0) || !(rev_cap >= 0)) throw Error("FlowGraph: edge capacities must be finite and non-negative");
    if (u == v) return;
    Node& nu = nodes_.at(static_cast<std::size_t>(u));
    Node& nv = nodes_.at(static_cast<std::size_t>(v));
    const int a = static_cast<int>(arcs_.size());
    arcs_.push_back({v, nu.first, cap});
    arcs_.push_back({u, nv.first, rev_cap});
    nu.first = a;
    nv.first = a + 1;
    solved_ = false;
}

void FlowGraph::set_active(int i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.active) {
        n.active = true;
        active_.push_back(i);
    }
}

int FlowGraph::next_active() {
    while (!active_.empty()) {
        const int i = active_.front();
        active_.pop_front();
        Node& n = nodes_[static_cast<std::size_t>(i)];
        n.active = false;
        if (n.parent != kNone) return i;
    }
    return kNone;
}

void FlowGraph::set_orphan(int i) {
    nodes_[static_cast<std::size_t>(i)].parent = kOrphan;
    orphans_.push_back(i);
}

void FlowGraph::augment(int middle) {
    // Bottleneck over source path, middle arc and sink path.
    double bottleneck = arcs_[static_cast<std::size_t>(middle)].r_cap;
    for (int i = tail(middle);;) {
        const int a = nodes_[static_cast<std::size_t>(i)].parent;
        if (a == kTerminal) {
            bottleneck = std::min(bottleneck, nodes_[static_cast<std::size_t>(i)].tr_cap);
            break;
        }
        bottleneck = std::min(bottleneck, arcs_[static_cast<std::size_t>(sister(a))].r_cap);
        i = arcs_[static_cast<std::size_t>(a)].head;
    }
    for (int i = arcs_[static_cast<std::size_t>(middle)].head;;) {
        const int a = nodes_[static_cast<std::size_t>(i)].parent;
        if (a == kTerminal) {
            bottleneck = std::min(bottleneck, -nodes_[static_cast<std::size_t>(i)].tr_cap);
            break;
        }
        bottleneck = std::min(bottleneck, arcs_[static_cast<std::size_t>(a)].r_cap);
        i = arcs_[static_cast<std::size_t>(a)].head;
    }

    arcs_[static_cast<std::size_t>(middle)].r_cap -= bottleneck;
    arcs_[static_cast<std::size_t>(sister(middle))].r_cap += bottleneck;

    for (int i = tail(middle);;) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        const int a = n.parent;
        if (a == kTerminal) {
            n.tr_cap -= bottleneck;
            if (n.tr_cap == 0) set_orphan(i);
            break;
        }
        arcs_[static_cast<std::size_t>(a)].r_cap += bottleneck;
        arcs_[static_cast<std::size_t>(sister(a))].r_cap -= bottleneck;
        const int next = arcs_[static_cast<std::size_t>(a)].head;
        if (arcs_[static_cast<std::size_t>(sister(a))].r_cap == 0) set_orphan(i);
        i = next;
    }
    for (int i = arcs_[static_cast<std::size_t>(middle)].head;;) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        const int a = n.parent;
        if (a == kTerminal) {
            n.tr_cap += bottleneck;
            if (n.tr_cap == 0) set_orphan(i);
            break;
        }
        arcs_[static_cast<std::size_t>(sister(a))].r_cap += bottleneck;
        arcs_[static_cast<std::size_t>(a)].r_cap -= bottleneck;
        const int next = arcs_[static_cast<std::size_t>(a)].head;
        if (arcs_[static_cast<std::size_t>(a)].r_cap == 0) set_orphan(i);
        i = next;
    }
    flow_ += bottleneck;
}

// Searches a new parent for source-tree orphan i among neighbours j with
// residual j->i that are rooted at the source; otherwise frees i.
void FlowGraph::process_source_orphan(int i) {
    int best_arc = kNone;
    int d_min = kInfiniteDist;
    for (int a0 = nodes_[static_cast<std::size_t>(i)].first; a0 != kNone; a0 = arcs_[static_cast<std::size_t>(a0)].next) {
        if (arcs_[static_cast<std::size_t>(sister(a0))].r_cap <= 0) continue;
        int j = arcs_[static_cast<std::size_t>(a0)].head;
        if (nodes_[static_cast<std::size_t>(j)].is_sink || nodes_[static_cast<std::size_t>(j)].parent == kNone) continue;
        int d = 0;
        for (;;) {
            Node& nj = nodes_[static_cast<std::size_t>(j)];
            if (nj.ts == time_) {
                d += nj.dist;
                break;
            }
            const int a = nj.parent;
            ++d;
            if (a == kTerminal) {
                nj.ts = time_;
                nj.dist = 1;
                break;
            }
            if (a == kOrphan) {
                d = kInfiniteDist;
                break;
            }
            j = arcs_[static_cast<std::size_t>(a)].head;
        }
        if (d < kInfiniteDist) {
            if (d < d_min) {
                best_arc = a0;
                d_min = d;
            }
            for (j = arcs_[static_cast<std::size_t>(a0)].head; nodes_[static_cast<std::size_t>(j)].ts != time_;
                 j = arcs_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(j)].parent)].head) {
                nodes_[static_cast<std::size_t>(j)].ts = time_;
                nodes_[static_cast<std::size_t>(j)].dist = d--;
            }
        }
    }
    Node& ni = nodes_[static_cast<std::size_t>(i)];
    if (best_arc != kNone) {
        ni.parent = best_arc;
        ni.ts = time_;
        ni.dist = d_min + 1;
        return;
    }
    ni.parent = kNone;
    for (int a0 = ni.first; a0 != kNone; a0 = arcs_[static_cast<std::size_t>(a0)].next) {
        const int j = arcs_[static_cast<std::size_t>(a0)].head;
        Node& nj = nodes_[static_cast<std::size_t>(j)];
        const int a = nj.parent;
        if (nj.is_sink || a == kNone) continue;
        if (arcs_[static_cast<std::size_t>(sister(a0))].r_cap > 0) set_active(j);
        if (a != kTerminal && a != kOrphan && arcs_[static_cast<std::size_t>(a)].head == i) set_orphan(j);
    }
}

void FlowGraph::process_sink_orphan(int i) {
    int best_arc = kNone;
    int d_min = kInfiniteDist;
    for (int a0 = nodes_[static_cast<std::size_t>(i)].first; a0 != kNone; a0 = arcs_[static_cast<std::size_t>(a0)].next) {
        if (arcs_[static_cast<std::size_t>(a0)].r_cap <= 0) continue;
        int j = arcs_[static_cast<std::size_t>(a0)].head;
        if (!nodes_[static_cast<std::size_t>(j)].is_sink || nodes_[static_cast<std::size_t>(j)].parent == kNone) continue;
        int d = 0;
        for (;;) {
            Node& nj = nodes_[static_cast<std::size_t>(j)];
            if (nj.ts == time_) {
                d += nj.dist;
                break;
            }
            const int a = nj.parent;
            ++d;
            if (a == kTerminal) {
                nj.ts = time_;
                nj.dist = 1;
                break;
            }
            if (a == kOrphan) {
                d = kInfiniteDist;
                break;
            }
            j = arcs_[static_cast<std::size_t>(a)].head;
        }
        if (d < kInfiniteDist) {
            if (d < d_min) {
                best_arc = a0;
                d_min = d;
            }
            for (j = arcs_[static_cast<std::size_t>(a0)].head; nodes_[static_cast<std::size_t>(j)].ts != time_;
                 j = arcs_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(j)].parent)].head) {
                nodes_[static_cast<std::size_t>(j)].ts = time_;
                nodes_[static_cast<std::size_t>(j)].dist = d--;
            }
        }
    }
    Node& ni = nodes_[static_cast<std::size_t>(i)];
    if (best_arc != kNone) {
        ni.parent = best_arc;
        ni.ts = time_;
        ni.dist = d_min + 1;
        return;
    }
    ni.parent = kNone;
    for (int a0 = ni.first; a0 != kNone; a0 = arcs_[static_cast<std::size_t>(a0)].next) {
        const int j = arcs_[static_cast<std::size_t>(a0)].head;
        Node& nj = nodes_[static_cast<std::size_t>(j)];
        const int a = nj.parent;
        if (!nj.is_sink || a == kNone) continue;
        if (arcs_[static_cast<std::size_t>(a0)].r_cap > 0) set_active(j);
        if (a != kTerminal && a != kOrphan && arcs_[static_cast<std::size_t>(a)].head == i) set_orphan(j);
    }
}

double FlowGraph::max_flow() {
    if (solved_) return flow_;
    active_.clear();
    orphans_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        Node& n = nodes_[i];
        n.active = false;
        n.ts = 0;
        if (n.tr_cap != 0) {
            n.is_sink = n.tr_cap < 0;
            n.parent = kTerminal;
            n.dist = 1;
            set_active(static_cast<int>(i));
        } else {
            n.parent = kNone;
            n.dist = 0;
        }
    }
    time_ = 0;

    int current = kNone;
    for (;;) {
        int i = current;
        if (i != kNone) {
            nodes_[static_cast<std::size_t>(i)].active = false;
            if (nodes_[static_cast<std::size_t>(i)].parent == kNone) i = kNone;
        }
        if (i == kNone) {
            i = next_active();
            if (i == kNone) break;
        }

        // Growth.
        int path_arc = kNone;
        Node& ni = nodes_[static_cast<std::size_t>(i)];
        if (!ni.is_sink) {
            for (int a = ni.first; a != kNone; a = arcs_[static_cast<std::size_t>(a)].next) {
                if (arcs_[static_cast<std::size_t>(a)].r_cap <= 0) continue;
                const int j = arcs_[static_cast<std::size_t>(a)].head;
                Node& nj = nodes_[static_cast<std::size_t>(j)];
                if (nj.parent == kNone) {
                    nj.is_sink = false;
                    nj.parent = sister(a);
                    nj.ts = ni.ts;
                    nj.dist = ni.dist + 1;
                    set_active(j);
                } else if (nj.is_sink) {
                    path_arc = a;
                    break;
                } else if (nj.ts <= ni.ts && nj.dist > ni.dist) {
                    nj.parent = sister(a);
                    nj.ts = ni.ts;
                    nj.dist = ni.dist + 1;
                }
            }
        } else {
            for (int a = ni.first; a != kNone; a = arcs_[static_cast<std::size_t>(a)].next) {
                if (arcs_[static_cast<std::size_t>(sister(a))].r_cap <= 0) continue;
                const int j = arcs_[static_cast<std::size_t>(a)].head;
                Node& nj = nodes_[static_cast<std::size_t>(j)];
                if (nj.parent == kNone) {
                    nj.is_sink = true;
                    nj.parent = sister(a);
                    nj.ts = ni.ts;
                    nj.dist = ni.dist + 1;
                    set_active(j);
                } else if (!nj.is_sink) {
                    path_arc = sister(a);
                    break;
                } else if (nj.ts <= ni.ts && nj.dist > ni.dist) {
                    nj.parent = sister(a);
                    nj.ts = ni.ts;
                    nj.dist = ni.dist + 1;
                }
            }
        }

        ++time_;
        if (path_arc != kNone) {
            // Keep i as the current node; mark active so it is not queued twice.
            nodes_[static_cast<std::size_t>(i)].active = true;
            current = i;
            augment(path_arc);
            while (!orphans_.empty()) {
                const int o = orphans_.front();
                orphans_.pop_front();
                if (nodes_[static_cast<std::size_t>(o)].is_sink)
                    process_sink_orphan(o);
                else
                    process_source_orphan(o);
            }
        } else {
            current = kNone;
        }
    }
    compute_segments();
    solved_ = true;
    return flow_;
}

void FlowGraph::compute_segments() {
    source_side_.assign(nodes_.size(), 0);
    std::vector<int> stack;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].tr_cap > 0) {
            source_side_[i] = 1;
            stack.push_back(static_cast<int>(i));
        }
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int a = nodes_[static_cast<std::size_t>(u)].first; a != kNone; a = arcs_[static_cast<std::size_t>(a)].next) {
            const int v = arcs_[static_cast<std::size_t>(a)].head;
            if (arcs_[static_cast<std::size_t>(a)].r_cap > 0 && !source_side_[static_cast<std::size_t>(v)]) {
                source_side_[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
}

bool FlowGraph::in_source_segment(int node) const {
    if (!solved_) throw Error("FlowGraph: call max_flow() before querying segments");
    return source_side_.at(static_cast<std::size_t>(node)) != 0;
}

}  // namespace plg
