#pragma once

#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "hsrq/errors.hpp"
#include "hsrq/matrix.hpp"

namespace hsrq {

enum class TaskKind {
    ReduceDiag,
    ReduceOffdiagShifted,
    ReduceOffdiagFar,
    SolveTile,
    UpdateShifted,
    UpdateFar,
    MergedSolveBacktransform,
};

std::string task_name(TaskKind k);

struct TaskNode {
    TaskKind kind;
    std::size_t tile_i;
    std::size_t tile_j;
    std::size_t batch;
    std::vector<std::size_t> successors;
    std::size_t predecessors = 0;
};

// Node ids are assigned in the order of the sequential algorithm, which is a
// topological order; single-worker execution runs nodes in id order.
class TaskGraph {
public:
    std::size_t add(TaskKind kind, std::size_t i, std::size_t j, std::size_t batch);
    void add_edge(std::size_t from, std::size_t to);

    const std::vector<TaskNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t edge_count() const;
    bool has_edge(std::size_t from, std::size_t to) const;
    bool is_acyclic() const;
    // Index of the node with these coordinates, or size() if absent.
    std::size_t find(TaskKind kind, std::size_t i, std::size_t j, std::size_t batch) const;

private:
    std::vector<TaskNode> nodes_;
};

// Reduce graph: ReduceDiag(j,j) -> ReduceOffdiag(i,j) for i < j; ReduceOffdiag(i,j) -> the
// task at (i, j-1). Batches are disconnected.
TaskGraph build_reduce_dag(const TileGrid& grid, std::size_t batches);

// Solve graph: Solve(j,j) -> Update(i,j) for i < j; Update(i,j) -> Update(i,j-1) so updates
// into one tile row run in a fixed order; Update(i,i+1) -> Solve(i,i). Solve(0,0) is merged
// with the backtransform.
TaskGraph build_solve_dag(const TileGrid& grid, std::size_t batches);

class TaskFailure : public Error {
public:
    TaskFailure(const TaskNode& node, std::exception_ptr cause, const std::string& message);

    TaskKind kind() const { return kind_; }
    std::size_t tile_i() const { return i_; }
    std::size_t tile_j() const { return j_; }
    std::size_t batch() const { return batch_; }
    std::exception_ptr cause() const { return cause_; }
    [[noreturn]] void rethrow_cause() const { std::rethrow_exception(cause_); }

private:
    TaskKind kind_;
    std::size_t i_, j_, batch_;
    std::exception_ptr cause_;
};

struct ExecutionReport {
    double wall_seconds = 0.0;
    double busy_seconds = 0.0;
    std::size_t workers = 1;
};

// Runs every node once after its predecessors using a ready set ordered by node id.
// The first failing task stops the graph: no new tasks start and TaskFailure is thrown.
ExecutionReport execute(const TaskGraph& graph, std::size_t workers,
                        const std::function<void(const TaskNode&)>& run);

// 0 means: HSRQ_WORKERS from the environment if set, else hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

} // namespace hsrq
