#pragma once

#include <string>

#include "bsdelab/sde/paths.hpp"

namespace bsdelab {

// Binary snapshot: magic "BSDEPATH", version, shape, grid span, then the
// raw column-major payload. Doubles are written verbatim, so a round trip
// is bit-exact on the writing machine.
void write_paths(const std::string& file, const PathEnsemble& e);
PathEnsemble read_paths(const std::string& file);

}  // namespace bsdelab
