#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace l0infer {

enum class Exec { serial, parallel };

/// C(n, k), saturating at cap (cap returned when the count would exceed it).
std::uint64_t binomial_capped(int n, int k, std::uint64_t cap);

/// Writes the combination of {0..n-1} of size k with lexicographic rank `rank`.
void unrank_combination(int n, int k, std::uint64_t rank, std::vector<int>& out);

/// Advances idx to the next lexicographic combination; false after the last.
bool next_combination(std::vector<int>& idx, int n);

// Normal-equation view of a least-squares problem: G = X^T X, c = X^T Y,
// yty = ||Y||^2, n = number of rows. Per-support solves gather submatrices
// of G so a scan never touches X.
struct GramSystem {
    Eigen::MatrixXd gram;
    Eigen::VectorXd xty;
    double yty = 0.0;
    int n = 0;

    static GramSystem build(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y);
};

// Least-squares fit on one support. rss is the residual sum of squares;
// rank_deficient marks supports solved through the pseudoinverse.
struct SupportFit {
    Eigen::VectorXd beta;
    double rss = 0.0;
    bool rank_deficient = false;
};

SupportFit solve_on_support(const GramSystem& sys, const std::vector<int>& support);

struct ScanResult {
    double objective = 0.0;  // rss/n + lambda_sq * |support|
    double rss = 0.0;
    std::vector<int> support;
    bool rank_deficient = false;
    bool valid = false;
};

// Strict total order used by every reduction: objective, then support size,
// then lexicographic support. Makes the scan result independent of the
// partitioning and thread count.
bool scan_better(const ScanResult& a, const ScanResult& b);

/// Minimizes rss/n + lambda_sq*|S| over all supports with size in
/// [size_min, size_max]. Enumeration order is by size, then lexicographic.
ScanResult scan_supports(const GramSystem& sys, int p, int size_min, int size_max,
                         double lambda_sq, Exec exec);

}  // namespace l0infer
