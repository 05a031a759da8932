#pragma once

#include <gtest/gtest.h>

#include <functional>

#include "hh/error.hpp"

inline hh::ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const hh::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no hh::Error thrown";
    return hh::ErrorCode::IoError;
}
