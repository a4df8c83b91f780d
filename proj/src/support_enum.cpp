#include "l0infer/support_enum.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <stdexcept>

namespace l0infer {

std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // result*(n-k+i)/i is exactly integral, and C(n-k+i, i) is
        // nondecreasing in i, so saturating early is safe.
        const __uint128_t t = static_cast<__uint128_t>(result) *
                              static_cast<std::uint64_t>(n - k + i) /
                              static_cast<std::uint64_t>(i);
        if (t >= cap) return cap;
        result = static_cast<std::uint64_t>(t);
    }
    return result;
}

void unrank_combination(int n, int k, std::uint64_t rank, std::vector<int>& out) {
    out.resize(static_cast<std::size_t>(k));
    int value = 0;
    for (int slot = 0; slot < k; ++slot) {
        std::uint64_t count = binomial_capped(n - value - 1, k - slot - 1, UINT64_MAX);
        while (rank >= count) {
            rank -= count;
            ++value;
            count = binomial_capped(n - value - 1, k - slot - 1, UINT64_MAX);
        }
        out[static_cast<std::size_t>(slot)] = value;
        ++value;
    }
}

bool next_combination(std::vector<int>& idx, int n) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[static_cast<std::size_t>(i)] < n - k + i) {
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) {
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
            }
            return true;
        }
    }
    return false;
}

GramSystem GramSystem::build(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    if (X.rows() != Y.size()) {
        throw std::invalid_argument("GramSystem: X and Y row counts differ");
    }
    GramSystem sys;
    sys.n = static_cast<int>(X.rows());
    sys.gram.noalias() = X.transpose() * X;
    sys.xty.noalias() = X.transpose() * Y;
    sys.yty = Y.squaredNorm();
    return sys;
}

namespace {

struct SolveWorkspace {
    Eigen::MatrixXd gram_s;
    Eigen::VectorXd c_s;
    Eigen::VectorXd beta;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

// rss and rank flag for one support; beta left in ws.beta.
void solve_with_workspace(const GramSystem& sys, const std::vector<int>& support,
                          SolveWorkspace& ws, double& rss, bool& rank_deficient) {
    const int s = static_cast<int>(support.size());
    rank_deficient = false;
    if (s == 0) {
        ws.beta.resize(0);
        rss = sys.yty;
        return;
    }
    ws.gram_s.resize(s, s);
    ws.c_s.resize(s);
    for (int a = 0; a < s; ++a) {
        ws.c_s(a) = sys.xty(support[static_cast<std::size_t>(a)]);
        for (int b = 0; b < s; ++b) {
            ws.gram_s(a, b) = sys.gram(support[static_cast<std::size_t>(a)],
                                       support[static_cast<std::size_t>(b)]);
        }
    }
    ws.llt.compute(ws.gram_s);
    if (ws.llt.info() == Eigen::Success) {
        ws.beta = ws.llt.solve(ws.c_s);
    } else {
        // Minimum-norm solution of the normal equations via the pseudoinverse.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ws.gram_s);
        ws.beta = cod.solve(ws.c_s);
        rank_deficient = cod.rank() < s;
    }
    // Any least-squares solution satisfies rss = ||Y||^2 - c^T beta.
    rss = std::max(0.0, sys.yty - ws.c_s.dot(ws.beta));
}

}  // namespace

SupportFit solve_on_support(const GramSystem& sys, const std::vector<int>& support) {
    SolveWorkspace ws;
    SupportFit fit;
    solve_with_workspace(sys, support, ws, fit.rss, fit.rank_deficient);
    fit.beta = ws.beta;
    return fit;
}

bool scan_better(const ScanResult& a, const ScanResult& b) {
    if (!b.valid) return a.valid;
    if (!a.valid) return false;
    if (a.objective != b.objective) return a.objective < b.objective;
    if (a.support.size() != b.support.size()) return a.support.size() < b.support.size();
    return a.support < b.support;
}

namespace {

void consider(ScanResult& best, double objective, double rss, bool rank_deficient,
              const std::vector<int>& support) {
    bool better = !best.valid;
    if (!better && objective != best.objective) better = objective < best.objective;
    else if (!better && support.size() != best.support.size())
        better = support.size() < best.support.size();
    else if (!better)
        better = support < best.support;
    if (better) {
        best.objective = objective;
        best.rss = rss;
        best.rank_deficient = rank_deficient;
        best.support = support;
        best.valid = true;
    }
}

ScanResult scan_range(const GramSystem& sys, int p, int size, double lambda_sq,
                      std::uint64_t begin, std::uint64_t end) {
    ScanResult best;
    if (begin >= end) return best;
    SolveWorkspace ws;
    std::vector<int> support;
    unrank_combination(p, size, begin, support);
    const double inv_n = 1.0 / static_cast<double>(sys.n);
    const double penalty = lambda_sq * static_cast<double>(size);
    for (std::uint64_t rank = begin; rank < end; ++rank) {
        double rss = 0.0;
        bool rank_deficient = false;
        solve_with_workspace(sys, support, ws, rss, rank_deficient);
        consider(best, rss * inv_n + penalty, rss, rank_deficient, support);
        if (rank + 1 < end) next_combination(support, p);
    }
    return best;
}

// Fixed block count so the partition (and therefore every per-block result)
// does not depend on the number of threads.
constexpr std::uint64_t kScanBlocks = 256;

ScanResult scan_size_parallel(const GramSystem& sys, int p, int size, double lambda_sq) {
    const std::uint64_t total = binomial_capped(p, size, UINT64_MAX);
    if (total == 0) return {};
    const std::uint64_t blocks = std::min<std::uint64_t>(kScanBlocks, total);
    std::vector<ScanResult> block_best(blocks);

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t blk = 0; blk < static_cast<std::int64_t>(blocks); ++blk) {
        const std::uint64_t begin = total * static_cast<std::uint64_t>(blk) / blocks;
        const std::uint64_t end = total * static_cast<std::uint64_t>(blk + 1) / blocks;
        block_best[static_cast<std::size_t>(blk)] =
            scan_range(sys, p, size, lambda_sq, begin, end);
    }

    ScanResult best;
    for (auto& cand : block_best) {
        if (scan_better(cand, best)) best = std::move(cand);
    }
    return best;
}

}  // namespace

ScanResult scan_supports(const GramSystem& sys, int p, int size_min, int size_max,
                         double lambda_sq, Exec exec) {
    if (size_min < 0 || size_max > p || size_min > size_max) {
        throw std::invalid_argument("scan_supports: invalid size range");
    }
    ScanResult best;
    for (int size = size_min; size <= size_max; ++size) {
        const std::uint64_t total = binomial_capped(p, size, UINT64_MAX);
        ScanResult cand = exec == Exec::parallel
                              ? scan_size_parallel(sys, p, size, lambda_sq)
                              : scan_range(sys, p, size, lambda_sq, 0, total);
        if (scan_better(cand, best)) best = std::move(cand);
    }
    return best;
}

}  // namespace l0infer
