#pragma once

namespace kite {

// Initializes libsodium once; safe to call from any thread.
void ensure_sodium();

}  // namespace kite
