#pragma once

#include "wnmine/time.hpp"
#include "wnmine/event_log.hpp"
#include "wnmine/log_io.hpp"
#include "wnmine/interest.hpp"
#include "wnmine/workflow_net.hpp"
#include "wnmine/discovery.hpp"
#include "wnmine/diagnostics.hpp"
#include "wnmine/simulator.hpp"
#include "wnmine/export.hpp"
