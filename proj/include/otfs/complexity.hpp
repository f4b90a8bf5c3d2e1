#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace otfs {

// Multiplication count of one detection per the published complexity
// expressions, evaluated with unit constants:
//   mp      (KL)^2 * P * M * T
//   uamp    (KL)^3 + (KL)^2 * T
//   bpic    (KL)^3 + (KL)^2 * T
//   bpicnet (KL)^3 + KL + (KL)^2 * T
//   ep      (KL)^3 * T
std::int64_t complexity_estimate(std::string_view detector, int subframes, int subcarriers,
                                 int mod_order, int path_count, int layers);

struct ComplexityRow {
    std::string detector;
    int subframes = 0, subcarriers = 0, mod_order = 0, path_count = 0, layers = 0;
    std::int64_t multiplications = 0;
};

// All five detectors at their customary iteration counts
// (mp 9, uamp 9, bpic 8, bpicnet 9, ep 5), or at `layers_override` when >= 0.
std::vector<ComplexityRow> complexity_table(int subframes, int subcarriers, int mod_order,
                                            int path_count, int layers_override = -1);

// Columns: detector, K, L, M, P, T, multiplications.
void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows);

}  // namespace otfs
