#pragma once

#include <cstdint>
#include <string>

#include "inferedge/profiles.hpp"

namespace inferedge {

// Units are fixed throughout: ms, J, bytes, bits per second.

struct ChannelState {
    std::string name;
    double bandwidth_bps = 0.0;
    /// Radio power while transmitting. Energy per bit is tx_power_w / bandwidth_bps.
    double tx_power_w = 0.5;

    void validate() const;
};

struct ServerState {
    double queue_time_ms = 0.0;
};

struct CostBreakdown {
    double local_latency_ms = 0.0;
    double trans_latency_ms = 0.0;
    double remote_latency_ms = 0.0;
    double total_latency_ms = 0.0;
    double comp_energy_j = 0.0;
    double trans_energy_j = 0.0;
    double total_energy_j = 0.0;
};

double transmission_time_ms(std::int64_t output_bytes, const ChannelState& channel);
double transmission_energy_j(std::int64_t output_bytes, const ChannelState& channel);
double computation_energy_j(double power_w, double local_latency_ms);

/// Latency is local + transmission + (queue + server tail); energy is the
/// device's cumulative compute energy plus the uplink energy. Totals are
/// plain sums of the reported components.
CostBreakdown evaluate_profile(const CutPointProfile& cut, const ChannelState& channel,
                               const ServerState& server);

}  // namespace inferedge
