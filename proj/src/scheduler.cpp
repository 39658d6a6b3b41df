#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <queue>
#include <string>
#include <thread>

#include "hsrq/scheduler.hpp"

namespace hsrq {

std::string task_name(TaskKind k) {
    switch (k) {
    case TaskKind::ReduceDiag: return "ReduceDiag";
    case TaskKind::ReduceOffdiagShifted: return "ReduceOffdiagShifted";
    case TaskKind::ReduceOffdiagFar: return "ReduceOffdiagFar";
    case TaskKind::SolveTile: return "SolveTile";
    case TaskKind::UpdateShifted: return "UpdateShifted";
    case TaskKind::UpdateFar: return "UpdateFar";
    case TaskKind::MergedSolveBacktransform: return "MergedSolveBacktransform";
    }
    return "?";
}

std::size_t TaskGraph::add(TaskKind kind, std::size_t i, std::size_t j, std::size_t batch) {
    nodes_.push_back(TaskNode{kind, i, j, batch, {}, 0});
    return nodes_.size() - 1;
}

void TaskGraph::add_edge(std::size_t from, std::size_t to) {
    nodes_.at(from).successors.push_back(to);
    ++nodes_.at(to).predecessors;
}

std::size_t TaskGraph::edge_count() const {
    std::size_t e = 0;
    for (const auto& n : nodes_) e += n.successors.size();
    return e;
}

bool TaskGraph::has_edge(std::size_t from, std::size_t to) const {
    const auto& s = nodes_.at(from).successors;
    return std::find(s.begin(), s.end(), to) != s.end();
}

bool TaskGraph::is_acyclic() const {
    std::vector<std::size_t> indeg(nodes_.size());
    for (std::size_t v = 0; v < nodes_.size(); ++v) indeg[v] = nodes_[v].predecessors;
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < nodes_.size(); ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        const std::size_t v = ready.back();
        ready.pop_back();
        ++seen;
        for (std::size_t s : nodes_[v].successors)
            if (--indeg[s] == 0) ready.push_back(s);
    }
    return seen == nodes_.size();
}

std::size_t TaskGraph::find(TaskKind kind, std::size_t i, std::size_t j, std::size_t batch) const {
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        const auto& n = nodes_[v];
        if (n.kind == kind && n.tile_i == i && n.tile_j == j && n.batch == batch) return v;
    }
    return nodes_.size();
}

TaskGraph build_reduce_dag(const TileGrid& grid, std::size_t batches) {
    const std::size_t N = grid.count();
    TaskGraph g;
    for (std::size_t b = 0; b < batches; ++b) {
        // at[i][j]: node for tile (i, j) of this batch.
        std::vector<std::vector<std::size_t>> at(N, std::vector<std::size_t>(N, 0));
        for (std::size_t j = N; j-- > 0;) {
            at[j][j] = g.add(TaskKind::ReduceDiag, j, j, b);
            for (std::size_t i = j; i-- > 0;)
                at[i][j] = g.add(i + 1 == j ? TaskKind::ReduceOffdiagShifted : TaskKind::ReduceOffdiagFar, i, j, b);
        }
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t i = 0; i < j; ++i) {
                g.add_edge(at[j][j], at[i][j]);
                g.add_edge(at[i][j], at[i][j - 1]);
            }
    }
    return g;
}

TaskGraph build_solve_dag(const TileGrid& grid, std::size_t batches) {
    const std::size_t N = grid.count();
    TaskGraph g;
    for (std::size_t b = 0; b < batches; ++b) {
        std::vector<std::vector<std::size_t>> at(N, std::vector<std::size_t>(N, 0));
        for (std::size_t j = N; j-- > 1;) {
            at[j][j] = g.add(TaskKind::SolveTile, j, j, b);
            for (std::size_t i = j; i-- > 0;)
                at[i][j] = g.add(i + 1 == j ? TaskKind::UpdateShifted : TaskKind::UpdateFar, i, j, b);
        }
        at[0][0] = g.add(TaskKind::MergedSolveBacktransform, 0, 0, b);
        for (std::size_t j = 1; j < N; ++j)
            for (std::size_t i = 0; i < j; ++i) {
                g.add_edge(at[j][j], at[i][j]);
                // Updates into one tile row are chained, the last one feeds its solve.
                g.add_edge(at[i][j], i + 1 == j ? at[i][i] : at[i][j - 1]);
            }
    }
    return g;
}

TaskFailure::TaskFailure(const TaskNode& node, std::exception_ptr cause, const std::string& message)
    : Error("task " + task_name(node.kind) + "(" + std::to_string(node.tile_i) + "," + std::to_string(node.tile_j) +
            ") batch " + std::to_string(node.batch) + " failed: " + message),
      kind_(node.kind), i_(node.tile_i), j_(node.tile_j), batch_(node.batch), cause_(std::move(cause)) {}

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HSRQ_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string describe(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown exception";
    }
}

using Clock = std::chrono::steady_clock;

} // namespace

ExecutionReport execute(const TaskGraph& graph, std::size_t workers,
                        const std::function<void(const TaskNode&)>& run) {
    const auto& nodes = graph.nodes();
    ExecutionReport report;
    report.workers = std::min(resolve_workers(workers), std::max<std::size_t>(nodes.size(), 1));
    const auto t0 = Clock::now();

    std::vector<std::size_t> pending(nodes.size());
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        pending[v] = nodes[v].predecessors;
        if (pending[v] == 0) ready.push(v);
    }

    std::mutex mu;
    std::condition_variable cv;
    std::size_t running = 0, done = 0;
    std::size_t failed_node = nodes.size();
    std::exception_ptr failure;
    double busy = 0.0;

    auto worker = [&] {
        std::unique_lock lock(mu);
        for (;;) {
            cv.wait(lock, [&] { return failure || !ready.empty() || done == nodes.size() || running == 0; });
            if (failure || done == nodes.size()) return;
            if (ready.empty()) {
                if (running == 0) return; // nothing left that could become ready
                continue;
            }
            const std::size_t v = ready.top();
            ready.pop();
            ++running;
            lock.unlock();
            const auto s = Clock::now();
            std::exception_ptr err;
            try {
                run(nodes[v]);
            } catch (...) {
                err = std::current_exception();
            }
            const std::chrono::duration<double> dt = Clock::now() - s;
            lock.lock();
            --running;
            ++done;
            busy += dt.count();
            if (err) {
                if (!failure) {
                    failure = err;
                    failed_node = v;
                }
            } else {
                for (std::size_t succ : nodes[v].successors)
                    if (--pending[succ] == 0) ready.push(succ);
            }
            cv.notify_all();
        }
    };

    if (report.workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(report.workers);
        for (std::size_t w = 0; w < report.workers; ++w) pool.emplace_back(worker);
    }

    report.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    report.busy_seconds = busy;
    if (failure) throw TaskFailure(nodes[failed_node], failure, describe(failure));
    if (done != nodes.size()) throw Error("task graph has a cycle");
    return report;
}

} // namespace hsrq
