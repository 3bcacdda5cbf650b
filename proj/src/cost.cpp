#include "inferedge/cost.hpp"

#include "inferedge/error.hpp"

namespace inferedge {

void ChannelState::validate() const {
    if (!(bandwidth_bps > 0.0))
        throw ConfigError("channel '" + name + "': bandwidth_bps must be > 0");
    if (!(tx_power_w >= 0.0)) throw ConfigError("channel '" + name + "': tx_power_w must be >= 0");
}

double transmission_time_ms(std::int64_t output_bytes, const ChannelState& channel) {
    return 8.0 * static_cast<double>(output_bytes) / channel.bandwidth_bps * 1000.0;
}

double transmission_energy_j(std::int64_t output_bytes, const ChannelState& channel) {
    const double joules_per_bit = channel.tx_power_w / channel.bandwidth_bps;
    return joules_per_bit * 8.0 * static_cast<double>(output_bytes);
}

double computation_energy_j(double power_w, double local_latency_ms) {
    return power_w * local_latency_ms / 1000.0;
}

CostBreakdown evaluate_profile(const CutPointProfile& cut, const ChannelState& channel,
                               const ServerState& server) {
    CostBreakdown b;
    b.local_latency_ms = cut.local_latency_ms;
    b.trans_latency_ms = transmission_time_ms(cut.output_bytes, channel);
    b.remote_latency_ms = server.queue_time_ms + cut.server_latency_ms;
    b.total_latency_ms = b.local_latency_ms + b.trans_latency_ms + b.remote_latency_ms;
    b.comp_energy_j = cut.local_energy_j;
    b.trans_energy_j = transmission_energy_j(cut.output_bytes, channel);
    b.total_energy_j = b.comp_energy_j + b.trans_energy_j;
    return b;
}

}  // namespace inferedge
