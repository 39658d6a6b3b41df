#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <type_traits>

#include "hsrq/errors.hpp"
#include "hsrq/inviter.hpp"
#include "hsrq/scheduler.hpp"
#include "hsrq/testprob.hpp"

namespace hsrq {

std::vector<complex> EigvecResult::vector(std::size_t k) const {
    const std::size_t c = first_column.at(k);
    std::vector<complex> v(vectors.rows());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = is_complex[k] ? complex(vectors(i, c), vectors(i, c + 1)) : complex(vectors(i, c), 0.0);
    return v;
}

std::vector<complex> EigvecResult::conjugate_vector(std::size_t k) const {
    std::vector<complex> v = vector(k);
    for (auto& z : v) z = std::conj(z);
    return v;
}

std::vector<double> starting_vector(const HessenbergMatrix& h) {
    const double rho = std::numeric_limits<double>::epsilon() * h.infinity_norm();
    if (!(rho > 0.0)) throw ConfigError("starting vector: matrix has zero norm");
    return std::vector<double>(h.order(), rho);
}

bool converged(double x_norm2, std::size_t n) { return x_norm2 > 0.1 / std::sqrt(static_cast<double>(n)); }

bool converged(const ScaledNorm& x_norm2, std::size_t n) {
    return x_norm2.exceeds(0.1 / std::sqrt(static_cast<double>(n)));
}

namespace {

// Restart r >= 1: random signs from (seed, r), one Gram-Schmidt pass against the earlier
// starts, rescaled to the norm of the first start. Shared by every shift restarted at r.
std::vector<double> restart_vector(const std::vector<std::vector<double>>& previous, std::uint64_t seed,
                                   std::size_t r) {
    const std::size_t n = previous.front().size();
    SplitMix64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (r + 1)));
    std::vector<double> v(n);
    for (auto& x : v) x = (rng.next() >> 63) ? -1.0 : 1.0;
    for (const auto& p : previous) {
        const double pp = std::inner_product(p.begin(), p.end(), p.begin(), 0.0);
        const double vp = std::inner_product(v.begin(), v.end(), p.begin(), 0.0);
        for (std::size_t i = 0; i < n; ++i) v[i] -= (vp / pp) * p[i];
    }
    const double target = std::sqrt(std::inner_product(previous[0].begin(), previous[0].end(),
                                                       previous[0].begin(), 0.0));
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm == 0.0) return previous[0]; // only when the sign draw repeats an earlier start exactly
    for (auto& x : v) x *= target / norm;
    return v;
}

// Shift index of a singular-factor error, looking through task wrappers.
std::optional<std::size_t> singular_shift(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const SingularError& s) {
        return s.shift();
    } catch (const TaskFailure& t) {
        return singular_shift(t.cause());
    } catch (...) {
        return std::nullopt;
    }
}

template <class T>
EigvecResult inviter_impl(const HessenbergMatrix& h, std::span<const T> values, const InviterConfig& cfg,
                          std::vector<double>* workspace) {
    constexpr bool cplx = std::is_same_v<T, complex>;
    constexpr std::size_t width = cplx ? 2 : 1;
    if (!h.is_unreduced()) throw StructureError("inverse iteration needs an unreduced Hessenberg matrix", 0, 0);
    const std::size_t n = h.order();
    const std::size_t m = values.size();

    EigvecResult out;
    out.vectors = RealMatrix(n, width * m);
    out.first_column.resize(m);
    out.is_complex.assign(m, cplx);
    out.converged.assign(m, false);
    out.restarts.assign(m, 0);
    for (std::size_t l = 0; l < m; ++l) out.first_column[l] = width * l;
    if (m == 0) return out;

    SolverOptions so;
    so.tile_rows = cfg.tile_rows;
    so.batch_width = cfg.batch_width;
    so.workers = cfg.workers;
    so.robust = true;
    so.mode = SolveMode::Eigenvector;
    so.flops = cfg.flops;
    so.times = cfg.times;
    std::vector<double> local;
    so.workspace = workspace ? workspace : &local;

    std::vector<std::vector<double>> starts{starting_vector(h)};
    std::vector<std::size_t> pending(m);
    std::iota(pending.begin(), pending.end(), 0);

    for (std::size_t attempt = 0; attempt <= cfg.max_restarts && !pending.empty(); ++attempt) {
        if (attempt > 0) starts.push_back(restart_vector(starts, cfg.seed, attempt));
        const std::vector<double>& start = starts.back();

        std::vector<T> shifts(pending.size());
        RealMatrix b(n, width * pending.size());
        for (std::size_t p = 0; p < pending.size(); ++p) {
            shifts[p] = values[pending[p]];
            std::copy(start.begin(), start.end(), b.col(width * p).begin());
        }
        // A shift on an eigenvalue can round R to an exact zero pivot. Like LAPACK, move that
        // shift by eps * ||H||_inf and solve again; the residual bound absorbs the change.
        SolutionBlock sol;
        for (std::size_t nudges = 0;; ++nudges) {
            try {
                if constexpr (cplx) sol = chsrq3(h, shifts, b, so);
                else sol = dhsrq3(h, shifts, b, so);
                break;
            } catch (const Error&) {
                const auto bad = singular_shift(std::current_exception());
                if (!bad || *bad >= shifts.size() || nudges >= 4 * shifts.size()) throw;
                shifts[*bad] += T(starts.front().front() * static_cast<double>(nudges / shifts.size() + 1));
            }
        }
        out.peak_workspace = std::max(out.peak_workspace, so.workspace->size());

        std::vector<std::size_t> still;
        for (std::size_t p = 0; p < pending.size(); ++p) {
            const std::size_t l = pending[p];
            if (attempt > 0) ++out.restarts[l];
            if (!converged(sol.norms[p], n)) {
                still.push_back(l);
                continue;
            }
            out.converged[l] = true;
            for (std::size_t w = 0; w < width; ++w) {
                const auto src = sol.x.col(width * p + w);
                std::copy(src.begin(), src.end(), out.vectors.col(width * l + w).begin());
            }
        }
        pending = std::move(still);
    }
    return out; // columns of unconverged values were never written and stay zero
}

} // namespace

EigvecResult dhsrq3in(const HessenbergMatrix& h, std::span<const double> eigenvalues, const InviterConfig& config) {
    return inviter_impl<double>(h, eigenvalues, config, nullptr);
}

EigvecResult chsrq3in(const HessenbergMatrix& h, std::span<const complex> eigenvalues, const InviterConfig& config) {
    return inviter_impl<complex>(h, eigenvalues, config, nullptr);
}

EigvecResult hsrq3in(const HessenbergMatrix& h, std::span<const complex> selection, const InviterConfig& config) {
    const std::size_t n = h.order();
    const std::size_t m = selection.size();
    if (config.tile_rows == 0 || config.batch_width == 0) throw ConfigError("tile sizes must be positive");
    const std::size_t tiles = TileGrid(n, std::min(config.tile_rows, n)).count();

    // Stable real-first ordering; order[k] is the caller index of sorted position k.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_partition(order.begin(), order.end(), [&](std::size_t k) { return selection[k].imag() == 0.0; });
    const std::size_t m_real = static_cast<std::size_t>(
        std::count_if(selection.begin(), selection.end(), [](complex z) { return z.imag() == 0.0; }));

    std::size_t g = m;
    if (config.workspace_cap > 0) {
        g = config.workspace_cap / (2 * n * tiles);
        if (g == 0) throw ConfigError("workspace cap too small for a single complex shift");
    }
    g = std::max<std::size_t>(g, 1);

    EigvecResult out;
    out.vectors = RealMatrix(n, m_real + 2 * (m - m_real));
    out.first_column.resize(m);
    out.is_complex.resize(m);
    out.converged.resize(m);
    out.restarts.resize(m);

    std::vector<double> workspace;
    std::size_t next_col = 0;
    auto place = [&](const EigvecResult& part, std::size_t sorted_begin) {
        for (std::size_t k = 0; k < part.size(); ++k) {
            const std::size_t caller = order[sorted_begin + k];
            const std::size_t w = part.is_complex[k] ? 2 : 1;
            out.is_complex[caller] = part.is_complex[k];
            out.converged[caller] = part.converged[k];
            out.restarts[caller] = part.restarts[k];
            for (std::size_t c = 0; c < w; ++c) {
                const auto src = part.vectors.col(part.first_column[k] + c);
                std::copy(src.begin(), src.end(), out.vectors.col(out.first_column[caller] + c).begin());
            }
        }
        out.peak_workspace = std::max(out.peak_workspace, part.peak_workspace);
    };
    for (std::size_t k = 0; k < m; ++k) {
        out.first_column[k] = next_col;
        next_col += selection[k].imag() == 0.0 ? 1 : 2;
    }

    // Group ends are min(l + group, count): the range never runs past the selection.
    std::vector<double> reals(m_real);
    for (std::size_t k = 0; k < m_real; ++k) reals[k] = selection[order[k]].real();
    for (std::size_t l = 0; l < m_real; l += 2 * g) {
        const std::size_t e = std::min(l + 2 * g, m_real);
        place(inviter_impl<double>(h, std::span<const double>(reals).subspan(l, e - l), config, &workspace), l);
    }
    std::vector<complex> cvals(m - m_real);
    for (std::size_t k = m_real; k < m; ++k) cvals[k - m_real] = selection[order[k]];
    for (std::size_t l = 0; l < cvals.size(); l += g) {
        const std::size_t e = std::min(l + g, cvals.size());
        place(inviter_impl<complex>(h, std::span<const complex>(cvals).subspan(l, e - l), config, &workspace),
              m_real + l);
    }
    return out;
}

} // namespace hsrq
