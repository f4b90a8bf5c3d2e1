#include "otfs/config.hpp"

#include <stdexcept>
#include <string>

namespace otfs {

void SystemConfig::validate() const {
    if (subframes < 1) throw std::invalid_argument("config: subframes must be >= 1");
    if (subcarriers < 1) throw std::invalid_argument("config: subcarriers must be >= 1");
    if (subcarrier_spacing_hz <= 0.0)
        throw std::invalid_argument("config: subcarrier spacing must be positive");
    if (max_delay_index < 0 || max_delay_index > subcarriers - 1)
        throw std::invalid_argument("config: max delay index must lie in [0, L-1]");
    if (max_doppler_index < 0 || max_doppler_index > subframes / 2)
        throw std::invalid_argument("config: max Doppler index must lie in [0, floor(K/2)]");
    if (mod_order < 4) throw std::invalid_argument("config: modulation order must be >= 4");
    int root = 2;
    while (root * root < mod_order) ++root;
    if (root * root != mod_order)
        throw std::invalid_argument("config: modulation order must be a perfect square");
    if (detector_layers < 1) throw std::invalid_argument("config: layer count must be >= 1");
}

}  // namespace otfs
