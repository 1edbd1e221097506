#include "gauss_counter/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace gauss_counter {

namespace {

std::mutex sink_mutex;

WarningSink& current_sink()
{
    static WarningSink sink = [](std::string_view message) {
        std::cerr << "gauss-counter: warning: " << message << '\n';
    };
    return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink)
{
    std::lock_guard lock(sink_mutex);
    return std::exchange(current_sink(), std::move(sink));
}

void warn(std::string_view message)
{
    std::lock_guard lock(sink_mutex);
    if (current_sink()) {
        current_sink()(message);
    }
}

}  // namespace gauss_counter
