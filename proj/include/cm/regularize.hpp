#pragma once

#include <map>
#include <string>
#include <vector>

#include "cm/poly.hpp"
#include "cm/rank.hpp"

namespace cm {

// Non-decreasing function on R >= 0: table values, then the last value plus slope per step.
struct RankTarget {
    std::vector<long> table{0};
    long slope = 0;

    static RankTarget constant(long c);
    // "const:4", "table:1,2,4", "table:1,2,4;slope:1", "affine:a,b" (a + b R)
    static RankTarget parse(const std::string& text);
    long operator()(long R) const;
};

struct RankTargetFamily {
    std::map<int, RankTarget> F;  // degree -> target; a missing degree means 0
    long at(int degree, long R) const;
};

// Monomial in output forms: sorted list of output indices (with repetition).
using ExprKey = std::vector<std::size_t>;
using Expression = std::map<ExprKey, mpq_class>;

struct RegStep {
    std::string kind;                 // "product", "modified" or "dependent"
    std::vector<std::size_t> members;  // form ids combined
    std::vector<mpz_class> lambda;
    std::size_t pivot = 0;             // id of the replaced form
    ProductDecomposition decomposition;
    std::vector<std::size_t> adjoined;  // ids of new forms that survived reselection
    long quadratic_after = 0, pure_z_after = 0;
};

struct Regularization {
    PolynomialSystem input, output;
    std::vector<std::size_t> output_ids;  // internal id of each output member
    std::vector<Expression> expressions;  // per input member, keys index output members
    std::vector<RegStep> log;
    long step_bound = 0;                  // from the induction measure 2 r2 + rbar2
    int lattice_height = 0;
    std::size_t linear_count = 0, quadratic_count = 0, pure_z_count = 0;
    // Smallest ceil(rank/2) over the searched combinations of the output quadratics (infinite if none).
    long certified_h_lower = kInfiniteRank;
    // Same for the modified rank of the quadratics that involve non-z variables (split runs only).
    long certified_modified_lower = kInfiniteRank;
    std::vector<std::string> notes;
};

// Exact check: input member k times the common denominator equals its expression in the output.
bool verify_expressions(const Regularization& reg);

Regularization regularize(const PolynomialSystem& sys, const RankTargetFamily& targets, int lattice_height = 10);
Regularization regularize_parametric(const PolynomialSystem& sys, const VariableSplit& vs,
                                     const RankTargetFamily& targets, int lattice_height = 10);

struct SplitSelection {
    VariableSplit split;                 // y = selected columns I, z = the rest
    SplitDecomposition decomposition;
    RankReport rank_f, rank_f1g, rank_f2;
    long threshold = 0;
    std::vector<std::vector<std::size_t>> minors;  // column blocks whose Jacobian minor is nonzero
};

struct SplitError : InvalidInput {
    SplitSelection partial;
    SplitError(const std::string& what, SplitSelection p) : InvalidInput(what), partial(std::move(p)) {}
};

// Primes used by the finite-field branch can be overridden for tests.
SplitSelection select_split(const PolynomialSystem& sys, long C1, long C2,
                            const std::vector<u64>& primes = {11, 13}, u64 box = 2000000);

}  // namespace cm
