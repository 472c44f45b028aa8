#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rfsizer {

enum class BlockId { vco, pa, lna, mixer, cascode, tx_system, rx_system };

inline constexpr BlockId kAllBlocks[] = {BlockId::vco,     BlockId::pa,        BlockId::lna,
                                         BlockId::mixer,   BlockId::cascode,   BlockId::tx_system,
                                         BlockId::rx_system};
inline constexpr BlockId kLeafBlocks[] = {BlockId::vco, BlockId::pa, BlockId::lna, BlockId::mixer,
                                          BlockId::cascode};

// One named quantity of a block schema. `si_scale` converts the external
// (table) unit to SI for evaluation; spec quantities are already natural
// (dB, Hz, V, W, %) and carry scale 1.
struct FieldDef {
    std::string name;
    std::string unit;
    double si_scale = 1.0;
};

struct BlockSchema {
    BlockId id;
    std::string name;
    std::vector<FieldDef> params;
    std::vector<FieldDef> specs;

    int param_index(const std::string& name) const;  // -1 when absent
    int spec_index(const std::string& name) const;
};

const BlockSchema& schema(BlockId id);
const std::string& block_name(BlockId id);

// Throws SchemaError on unknown name.
BlockId block_from_name(const std::string& name);
std::optional<BlockId> try_block_from_name(const std::string& name);

}  // namespace rfsizer
