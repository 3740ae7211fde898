#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bapmsim/domain.hpp"

namespace bapmsim::adv {

enum class Platform { MemoryMode, AppDirectMode, Mixed, NoBapmNeeded };
enum class Strategy { Fsdax, DistributedEphemeralFs, DirectAccess };

/// A platform choice, an AppDirect usage strategy when one applies, and
/// the ordered question/answer trail that produced them.
struct Recommendation {
    Platform platform = Platform::NoBapmNeeded;
    std::optional<Strategy> strategy;
    std::vector<std::pair<std::string, std::string>> trail;
};

/// First decision tree: platform mode from the memory/I/O pressure flags.
Recommendation recommend_platform_mode(const ApplicationProfile& profile);

/// Second decision tree: how to use the AppDirect space. Throws
/// SimError(PatternRequired) when the profile declares no I/O pattern.
Recommendation recommend_appdirect_strategy(const ApplicationProfile& profile);

/// Composes both trees. Total over every flag combination: a profile that
/// claims I/O intensity but declares no I/O pattern is treated as not
/// I/O-pressured (the override is recorded in the trail).
Recommendation recommend(const ApplicationProfile& profile);

const char* to_string(Platform p);
const char* to_string(Strategy s);
std::string describe(const Recommendation& rec);

} // namespace bapmsim::adv
