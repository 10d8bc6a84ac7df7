#pragma once

#include "cachecap/errors.hpp"
#include "cachecap/network.hpp"
#include "cachecap/scenario.hpp"
#include "cachecap/capacity.hpp"
#include "cachecap/task_oracle.hpp"
#include "cachecap/access_source.hpp"
#include "cachecap/sources.hpp"
#include "cachecap/entropy.hpp"
#include "cachecap/source_io.hpp"
