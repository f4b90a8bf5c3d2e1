#include "otfs/complexity.hpp"

#include <ostream>
#include <stdexcept>

namespace otfs {

std::int64_t complexity_estimate(std::string_view detector, int subframes, int subcarriers,
                                 int mod_order, int path_count, int layers) {
    const std::int64_t kl = static_cast<std::int64_t>(subframes) * subcarriers;
    const std::int64_t kl2 = kl * kl;
    const std::int64_t kl3 = kl2 * kl;
    const std::int64_t t = layers;
    if (detector == "mp") return kl2 * path_count * mod_order * t;
    if (detector == "uamp") return kl3 + kl2 * t;
    if (detector == "bpic") return kl3 + kl2 * t;
    if (detector == "bpicnet") return kl3 + kl + kl2 * t;
    if (detector == "ep") return kl3 * t;
    throw std::invalid_argument("complexity_estimate: unknown detector '" +
                                std::string(detector) + "'");
}

std::vector<ComplexityRow> complexity_table(int subframes, int subcarriers, int mod_order,
                                            int path_count, int layers_override) {
    struct Entry {
        const char* name;
        int default_layers;
    };
    // Customary iteration counts for the published comparison.
    static const Entry entries[] = {
        {"mp", 9}, {"uamp", 9}, {"bpic", 8}, {"bpicnet", 9}, {"ep", 5},
    };
    std::vector<ComplexityRow> rows;
    rows.reserve(5);
    for (const auto& e : entries) {
        ComplexityRow r;
        r.detector = e.name;
        r.subframes = subframes;
        r.subcarriers = subcarriers;
        r.mod_order = mod_order;
        r.path_count = path_count;
        r.layers = layers_override >= 0 ? layers_override : e.default_layers;
        r.multiplications =
            complexity_estimate(e.name, subframes, subcarriers, mod_order, path_count, r.layers);
        rows.push_back(r);
    }
    return rows;
}

void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows) {
    out << "detector,K,L,M,P,T,multiplications\n";
    for (const auto& r : rows)
        out << r.detector << ',' << r.subframes << ',' << r.subcarriers << ',' << r.mod_order
            << ',' << r.path_count << ',' << r.layers << ',' << r.multiplications << '\n';
}

}  // namespace otfs
