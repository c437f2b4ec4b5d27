#pragma once

// Geometry file reader. Format (YAML, lengths in micrometres):
//
//   name: fourpillar
//   units: um                      # optional, um (default) or mm
//   characteristic_distance: 100   # ion to nearest RF electrode
//   electrodes:
//     - name: RF1
//       role: RF+                  # RF+, RF- or DC
//       box: {min: [100, -50, 0], max: [200, 50, 300], open: [zmin]}
//     - name: DC5
//       role: DC
//       rect: {origin: [-100, -100, 0], u: [200, 0, 0], v: [0, 200, 0]}
//     - name: SHIELD
//       role: DC
//       sphere: {center: [0, 0, 0], radius: 2000}
//     - name: PAD
//       role: DC
//       panels:
//         - [[0, 0, 0], [10, 0, 0], [10, 10, 0], [0, 10, 0]]
//
// An electrode may combine several primitives by giving lists under `boxes`,
// `rects` or `spheres`. Schema violations throw SchemaError with the line number.

#include <istream>
#include <string>

#include "paultrap/fields/geometry.hpp"

namespace paultrap {

ElectrodeSystem parse_geometry(const std::string& yaml_text, const std::string& source_name = "<string>");
ElectrodeSystem load_geometry(const std::string& path);

}  // namespace paultrap
