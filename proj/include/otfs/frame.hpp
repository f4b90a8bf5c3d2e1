#pragma once

#include "otfs/channel.hpp"
#include "otfs/config.hpp"
#include "otfs/constellation.hpp"
#include "otfs/model.hpp"

namespace otfs {

// One end-to-end transmission: channel realization, transmitted symbols and
// the resulting real-valued detection problem with ground truth attached.
struct FrameInstance {
    ChannelRealization channel;
    std::vector<int> labels;
    CVec symbols;
    CVec received;
    RealModel model;
};

// Draw order from `rng` is fixed (channel, labels, noise) so frames are
// reproducible from the stream alone.
FrameInstance make_frame(const SystemConfig& cfg, const Constellation& c, int path_count,
                         double snr_db, Rng& rng);

}  // namespace otfs
