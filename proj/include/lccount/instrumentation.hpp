#pragma once

#include <atomic>

namespace lccount::instrumentation {

// Call counters for the training-only machinery; inference must leave them
// untouched.
inline std::atomic<long> split_calls{0};
inline std::atomic<long> false_positive_calls{0};

}  // namespace lccount::instrumentation
