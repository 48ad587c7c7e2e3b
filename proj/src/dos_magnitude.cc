// Copyright 2026 The bsid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bsid/simnet.h"

namespace bsid {

double DosMagnitudeBytes(double bandwidth_mbps, double record_bytes,
                         double hours, DosModel model) {
  if (bandwidth_mbps <= 0 || record_bytes <= 0 || hours <= 0 ||
      model.id_wire_bytes <= 0) {
    return 0.0;
  }
  const double efficiency = std::min(model.mac_efficiency, 1.0);
  const double ids_per_second =
      bandwidth_mbps * 1e6 * efficiency / (model.id_wire_bytes * 8.0);
  return ids_per_second * record_bytes * 3600.0 * hours;
}

}  // namespace bsid
