#pragma once

#include <string>
#include <vector>

#include "maglab/chart.hpp"

namespace maglab {

struct CatalogEntry {
  std::string name;
  std::string note;
};

/// Built-in systems on S^1 x R^2 with T = 2*pi.  FLAT is of strong type as
/// declared; HELIX/TWIST/WAVY verify semi-strong and become strong after
/// rescaling.
SystemChart make_flat();
SystemChart make_helix();
SystemChart make_twist();
SystemChart make_wavy();

const std::vector<CatalogEntry>& catalog_entries();
SystemChart catalog_system(const std::string& name);

}  // namespace maglab
