"""E_W 计算服务：精确代数、分次群、Koszul 对偶、L∞ / A∞ 结构、BGG 函子与环面数据"""
