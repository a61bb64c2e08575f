# utils工具模块

