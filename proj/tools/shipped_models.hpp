#pragma once

#include "qmf/model_io.hpp"

#include <map>
#include <string>

namespace qmf::shipped {

/// The built-in nested-agents model as a model document; build_graph on it
/// reproduces fr_model().full exactly.
ModelFile fr();

/// Ket-half configuration graphs behind the two pinned tables.
ModelFile table1();
ModelFile table2();

/// A small single-measurement chain with a non-trivial rotation.
ModelFile elementary();

/// Interaction families: the exact one-shot measurement and a partially
/// decohering rotation family.
ModelFile oneshot2_family();
ModelFile partial_family();

/// Controlled-NOT interaction with the probe re-fed.
ModelFile undo_cnot();

/// Interaction gadget followed by system-only evolution; the separation
/// condition holds.
ModelFile separation_demo();

/// All shipped models keyed by file name.
std::map<std::string, ModelFile> all();

} // namespace qmf::shipped
