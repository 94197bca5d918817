"""
Core 业务能力模块。
"""

