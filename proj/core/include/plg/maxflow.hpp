#pragma once

#include <deque>
#include <vector>

namespace plg {

/// s-t flow network with terminal links, solved with the Boykov-Kolmogorov
/// augmenting-path algorithm (search trees grown from both terminals and
/// reused between augmentations), which suits grid graphs.
///
/// Usage: add terminal weights and edges, call max_flow() once, then query
/// in_source_segment().
class FlowGraph {
public:
    explicit FlowGraph(int n_nodes);

    int node_count() const noexcept { return static_cast<int>(nodes_.size()); }

    /// Adds capacity source->node and node->sink (both >= 0). Repeated calls
    /// accumulate.
    void add_terminal_weights(int node, double source_cap, double sink_cap);

    /// Directed pair u->v with `cap` and v->u with `rev_cap` (both >= 0).
    void add_edge(int u, int v, double cap, double rev_cap);

    double max_flow();

    /// True when the node is reachable from the source in the residual graph.
    bool in_source_segment(int node) const;

private:
    static constexpr int kNone = -1;
    static constexpr int kTerminal = -2;
    static constexpr int kOrphan = -3;

    struct Arc {
        int head;
        int next;  ///< next arc out of the same tail
        double r_cap;
    };
    struct Node {
        int first = kNone;
        int parent = kNone;
        double tr_cap = 0;  ///< >0: residual source->node, <0: residual node->sink
        long ts = 0;
        int dist = 0;
        bool is_sink = false;
        bool active = false;
    };

    static int sister(int a) noexcept { return a ^ 1; }
    int tail(int a) const noexcept { return arcs_[static_cast<std::size_t>(sister(a))].head; }

    void set_active(int i);
    int next_active();
    void augment(int middle);
    void process_source_orphan(int i);
    void process_sink_orphan(int i);
    void set_orphan(int i);
    void compute_segments();

    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    std::deque<int> active_;
    std::deque<int> orphans_;
    std::vector<char> source_side_;
    double flow_ = 0;
    long time_ = 0;
    bool solved_ = false;
};

}  // namespace plg
