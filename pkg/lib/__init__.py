# Library package