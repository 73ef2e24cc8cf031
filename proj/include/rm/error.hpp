#pragma once

#include <stdexcept>
#include <string>

#include "rm/rm.h"

namespace rm {

class Error : public std::runtime_error {
public:
    Error(rm_status code, const std::string& what) : std::runtime_error(what), code_(code) {}
    rm_status code() const noexcept { return code_; }

private:
    rm_status code_;
};

const char* status_name(rm_status code) noexcept;

}  // namespace rm
