#pragma once

#include "ttubs/net_model.hpp"
#include "ttubs/schedule.hpp"
#include "ttubs/simulator.hpp"

namespace ttubs::fixtures {

/// Star topology: AV1, AV2, Radar and ZonalHost feed SW2, which forwards via SW1 to
/// CentralHost. 1 Gb/s full-duplex links, 8 queues. Streams cam1, cam2, radar, control.
Scenario adas_scenario();

/// Eligibility offsets at SW2 and SW1 egress from the SMT-WA-NFIC run, talkers at slot starts.
Schedule table3_schedule(const Scenario& adas);
/// LS-TB-NFIC offsets.
Schedule table8_schedule(const Scenario& adas);
/// AT-NFIC offsets. The radar SW2 entry is not printed; it is filled with the
/// earliest feasible offset (3 376 ns).
Schedule table7_schedule(const Scenario& adas);
/// Table 3 offsets with per-stream queues on switch egress
/// (control 7, radar 6, cam2 5, cam1 4) as in the SMT-WA gate list of SW2.
Schedule table6_schedule(const Scenario& adas);

/// Frame loss: drop the first cam2 frame entering SW2 from AV2 at or after 21 us.
AttackConfig loss_attack(const Scenario& adas);
/// Frame delay: hold the first cam2 frame entering SW1 from SW2 at or after 21 us.
AttackConfig delay_attack(const Scenario& adas, Nanos delay);

} // namespace ttubs::fixtures
