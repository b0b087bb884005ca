"""Result files and terminal display"""
