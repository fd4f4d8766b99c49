# Core utilities for the DCME toolkit
