#pragma once

#include <gtest/gtest.h>

#include "kite/error.hpp"

// Asserts that `stmt` throws kite::Error carrying `expected`.
#define EXPECT_THROW_CODE(stmt, expected)                                       \
  do {                                                                          \
    bool kite_thrown_ = false;                                                  \
    try {                                                                       \
      (void)(stmt);                                                             \
    } catch (const ::kite::Error& kite_err_) {                                  \
      kite_thrown_ = true;                                                      \
      EXPECT_EQ(kite_err_.code(), (expected)) << kite_err_.what();              \
    }                                                                           \
    EXPECT_TRUE(kite_thrown_) << "expected kite::Error from " #stmt;            \
  } while (0)
